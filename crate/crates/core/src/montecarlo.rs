//! Replicated estimators: SIR tail probabilities and their scalings, the
//! Palm expectation in the tail constant, and circumradius tails.
//!
//! Replication `i` draws from [`RngStream`]`(seed, i)` and replications are
//! reduced in fixed-size blocks in index order, so every estimate depends
//! on `(seed, n)` only, never on the number of worker threads.

pub mod voronoi;

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::beta::inv_beta_reg;
use statrs::function::gamma::ln_gamma;

use crate::asymptotics::{AsymptoticConstant, ConstantProcess, Method};
use crate::error::{check_alpha, check_beta, check_lattice_a, domain, Error, Result};
use crate::fading::{FadingModel, FadingSampler};
use crate::output::ext_f64;
use crate::pathloss::PathLossModel;
use crate::pointproc::{
    lattice_points, sample_lattice_mixture, sample_lattice_spacing, sample_poisson_ball, unit_ball_volume,
    GinibreSampler, Mode, PoissonRadii, ProcessModel,
};
use crate::rng::{RngStream, SimRng};
use crate::sir::{sir_from_radii, truncation_interference_bound, SirSample};

pub use voronoi::circumscribed_radius;

/// Replications per reduction block.
const BLOCK: u64 = 2048;
/// Window doublings tried before a replication is declared a failure.
pub const MAX_DOUBLINGS: u32 = 10;

/// Runs `f` on consecutive index blocks of `0..n` and returns the results in
/// block order.
fn run_blocks<T, F>(n: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, u64) -> Result<T> + Sync + Send,
{
    let blocks = n.div_ceil(BLOCK);
    let range = move |b: u64| (b * BLOCK, ((b + 1) * BLOCK).min(n));
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..blocks).into_par_iter().map(|b| {
            let (lo, hi) = range(b);
            f(lo, hi)
        })
        .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..blocks)
            .map(|b| {
                let (lo, hi) = range(b);
                f(lo, hi)
            })
            .collect()
    }
}

/// Clopper–Pearson interval for `k` successes in `n` trials at the given
/// confidence level.
pub fn clopper_pearson(k: u64, n: u64, level: f64) -> [f64; 2] {
    let tail = 0.5 * (1.0 - level);
    let (k, n) = (k as f64, n as f64);
    let lo = if k == 0.0 { 0.0 } else { inv_beta_reg(k, n - k + 1.0, tail) };
    let hi = if k == n { 1.0 } else { inv_beta_reg(k + 1.0, n - k, 1.0 - tail) };
    [lo, hi]
}

/// How far from the origin stationary configurations are generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WindowPolicy {
    /// Smallest radius holding `min_expected_points` on average and whose
    /// omitted mean interference is below `truncation_fraction · E[H] ℓ(r_typ)`,
    /// `r_typ = (λπ_d)^{-1/d}`.
    Auto { min_expected_points: f64, truncation_fraction: f64 },
    Fixed { radius: f64 },
}

impl Default for WindowPolicy {
    fn default() -> Self {
        Self::Auto { min_expected_points: 200.0, truncation_fraction: 1e-3 }
    }
}

impl WindowPolicy {
    pub fn resolve(&self, process: &ProcessModel, fading: &FadingModel, pathloss: &PathLossModel) -> Result<f64> {
        match *self {
            Self::Fixed { radius } if radius > 0.0 && radius.is_finite() => Ok(radius),
            Self::Fixed { radius } => Err(domain(format!("window radius must be positive (got {radius})"))),
            Self::Auto { min_expected_points, truncation_fraction } => {
                if !(min_expected_points > 0.0 && truncation_fraction > 0.0) {
                    return Err(domain("window policy knobs must be positive"));
                }
                let lambda = process.intensity();
                let d = pathloss.dim();
                let mass = lambda * unit_ball_volume(d)?;
                let r_typ = mass.powf(-1.0 / d as f64);
                let target = truncation_fraction * fading.mean() * pathloss.eval(r_typ)?;
                let mut r = (min_expected_points / mass).powf(1.0 / d as f64);
                for _ in 0..400 {
                    if truncation_interference_bound(lambda, fading, pathloss, r)? <= target {
                        return Ok(r);
                    }
                    r *= 1.1;
                }
                Err(Error::InsufficientConfiguration("no window meets the truncation target".into()))
            }
        }
    }
}

/// Geometry of one replication, evaluated straight into an SIR.
pub trait ConfigurationSource: Sync {
    fn intensity(&self) -> f64;
    fn window_radius(&self) -> f64;

    /// SIR of one stationary replication; fading is drawn from `fading_rng`.
    #[allow(clippy::too_many_arguments)]
    fn evaluate(
        &self,
        geometry_rng: &mut SimRng,
        fading_rng: &mut SimRng,
        fading: &FadingSampler,
        pathloss: &PathLossModel,
        truncation_bound: f64,
        stop_below: f64,
    ) -> Result<SirSample>;
}

enum Geometry {
    Poisson { intensity: f64, d: u32 },
    Ginibre(Vec<GinibreSampler>),
    Lattice { a: f64 },
}

/// Stationary samples of a [`ProcessModel`] in a ball of given radius,
/// doubled up to [`MAX_DOUBLINGS`] times when fewer than two points fall in.
pub struct ModelSource {
    process: ProcessModel,
    geometry: Geometry,
    window_radius: f64,
}

impl ModelSource {
    pub fn new(process: ProcessModel, d: u32, window_radius: f64) -> Result<Self> {
        process.validate()?;
        if !(window_radius > 0.0) {
            return Err(domain("window radius must be positive"));
        }
        let geometry = match process {
            ProcessModel::Poisson { intensity } => Geometry::Poisson { intensity, d },
            _ if d != 2 => {
                return Err(Error::Unsupported(format!("{process} is only defined in the plane (d = 2)")));
            }
            ProcessModel::Ginibre { alpha } => {
                // samplers for the doubled windows are built on first use
                Geometry::Ginibre(vec![GinibreSampler::new(alpha, Mode::Stationary, window_radius)?])
            }
            ProcessModel::Lattice { a } => Geometry::Lattice { a },
        };
        Ok(Self { process, geometry, window_radius })
    }

    #[allow(clippy::too_many_arguments)]
    fn attempt(
        &self,
        radius: f64,
        attempt: usize,
        grng: &mut SimRng,
        frng: &mut SimRng,
        fading: &FadingSampler,
        pathloss: &PathLossModel,
        bound: f64,
        stop_below: f64,
    ) -> Result<SirSample> {
        match &self.geometry {
            Geometry::Poisson { intensity, d } => {
                let radii = PoissonRadii::new(*intensity, *d, grng)?.take_while(|&r| r <= radius);
                sir_from_radii(radii, fading, pathloss, bound, stop_below, frng)
            }
            Geometry::Ginibre(samplers) => {
                let owned;
                let sampler = match samplers.get(attempt) {
                    Some(s) => s,
                    None => {
                        let alpha = match self.process {
                            ProcessModel::Ginibre { alpha } => alpha,
                            _ => unreachable!("Ginibre geometry"),
                        };
                        owned = GinibreSampler::new(alpha, Mode::Stationary, radius)?;
                        &owned
                    }
                };
                let s = sampler.sample(false, grng);
                sir_from_radii(s.radii.iter().copied(), fading, pathloss, bound, stop_below, frng)
            }
            Geometry::Lattice { a } => {
                let s = sample_lattice_mixture(*a, Mode::Stationary, radius, grng)?;
                let radii = s.sample.radii.iter().copied().take_while(|&r| r <= radius);
                sir_from_radii(radii, fading, pathloss, bound, stop_below, frng)
            }
        }
    }
}

impl ConfigurationSource for ModelSource {
    fn intensity(&self) -> f64 {
        self.process.intensity()
    }

    fn window_radius(&self) -> f64 {
        self.window_radius
    }

    fn evaluate(
        &self,
        grng: &mut SimRng,
        frng: &mut SimRng,
        fading: &FadingSampler,
        pathloss: &PathLossModel,
        bound: f64,
        stop_below: f64,
    ) -> Result<SirSample> {
        let mut radius = self.window_radius;
        for attempt in 0..=MAX_DOUBLINGS as usize {
            match self.attempt(radius, attempt, grng, frng, fading, pathloss, bound, stop_below) {
                Err(Error::InsufficientConfiguration(_)) => radius *= 2.0,
                other => return other,
            }
        }
        Err(Error::InsufficientConfiguration(format!(
            "fewer than 2 points after {MAX_DOUBLINGS} window doublings (last radius {radius})"
        )))
    }
}

/// The same radii in every replication; fading is still random.
pub struct FixedRadii {
    pub radii: Vec<f64>,
}

impl ConfigurationSource for FixedRadii {
    fn intensity(&self) -> f64 {
        1.0 / PI
    }

    fn window_radius(&self) -> f64 {
        f64::INFINITY
    }

    fn evaluate(
        &self,
        _grng: &mut SimRng,
        frng: &mut SimRng,
        fading: &FadingSampler,
        pathloss: &PathLossModel,
        bound: f64,
        stop_below: f64,
    ) -> Result<SirSample> {
        sir_from_radii(self.radii.iter().copied(), fading, pathloss, bound, stop_below, frng)
    }
}

/// Inputs of a tail estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailConfig {
    pub process: ProcessModel,
    pub fading: FadingModel,
    pub pathloss: PathLossModel,
    #[serde(default)]
    pub window: WindowPolicy,
    pub n: u64,
    pub seed: u64,
}

/// Smallest replication count accepted by the tail estimators.
pub const MIN_REPLICATIONS: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub theta: f64,
    pub p_hat: f64,
    /// Binomial standard error `sqrt(p(1-p)/n)`.
    pub stderr: f64,
    pub n: u64,
    /// `θ^{1/β} p_hat`.
    pub scaled_unbounded: f64,
    /// `log(p_hat) / h(θ)` for bounded path loss and `θ > 1`.
    #[serde(with = "ext_f64::opt", default)]
    pub scaled_bounded: Option<f64>,
    pub h_used: String,
    /// 95% Clopper–Pearson interval, given when `p_hat < 10/n` and the
    /// normal approximation behind `stderr` is poor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clopper_pearson: Option<[f64; 2]>,
}

impl TailEstimate {
    pub fn from_counts(theta: f64, k: u64, n: u64, pathloss: &PathLossModel) -> Self {
        let p = k as f64 / n as f64;
        let scaled_bounded = if pathloss.is_bounded() && theta > 1.0 {
            pathloss.h(theta).ok().map(|h| p.ln() / h)
        } else {
            None
        };
        Self {
            theta,
            p_hat: p,
            stderr: (p * (1.0 - p) / n as f64).sqrt(),
            n,
            scaled_unbounded: theta.powf(1.0 / pathloss.beta()) * p,
            scaled_bounded,
            h_used: pathloss.h_description().to_string(),
            clopper_pearson: (p < 10.0 / n as f64).then(|| clopper_pearson(k, n, 0.95)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailCurve {
    pub window_radius: f64,
    /// Mean interference omitted beyond the window.
    pub truncation_bound: f64,
    pub estimates: Vec<TailEstimate>,
    /// Estimates with the truncation bound added to every interference sum.
    pub pessimistic: Vec<TailEstimate>,
}

fn check_thetas(thetas: &[f64]) -> Result<()> {
    if thetas.is_empty() {
        return Err(domain("at least one threshold is needed"));
    }
    if thetas.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(domain("thresholds must be positive and finite"));
    }
    if thetas.windows(2).any(|w| w[1] < w[0]) {
        return Err(domain("thresholds must be ascending"));
    }
    Ok(())
}

/// `P(SIR > θ)` for every θ of an ascending grid, from shared replications.
pub fn scaled_tail_curve(cfg: &TailConfig, thetas: &[f64]) -> Result<TailCurve> {
    cfg.fading.validate()?;
    cfg.pathloss.validate()?;
    let radius = cfg.window.resolve(&cfg.process, &cfg.fading, &cfg.pathloss)?;
    let source = ModelSource::new(cfg.process, cfg.pathloss.dim(), radius)?;
    let bound = truncation_interference_bound(cfg.process.intensity(), &cfg.fading, &cfg.pathloss, radius)?;
    tail_curve_from_source(&source, &cfg.fading, &cfg.pathloss, bound, thetas, cfg.n, cfg.seed)
}

/// `P(SIR > θ)` at one threshold.
pub fn estimate_tail(cfg: &TailConfig, theta: f64) -> Result<TailEstimate> {
    Ok(scaled_tail_curve(cfg, &[theta])?.estimates.remove(0))
}

/// Tail curve for an arbitrary configuration source.
pub fn tail_curve_from_source<S: ConfigurationSource>(
    source: &S,
    fading: &FadingModel,
    pathloss: &PathLossModel,
    truncation_bound: f64,
    thetas: &[f64],
    n: u64,
    seed: u64,
) -> Result<TailCurve> {
    check_thetas(thetas)?;
    if n < MIN_REPLICATIONS {
        return Err(domain(format!("at least {MIN_REPLICATIONS} replications are required (got {n})")));
    }
    let sampler = fading.sampler()?;
    let stop_below = thetas[0];
    let m = thetas.len();
    let blocks = run_blocks(n, |lo, hi| {
        let mut counts = vec![0u64; 2 * m];
        for i in lo..hi {
            let (mut grng, mut frng) = RngStream::new(seed, i).split();
            let s = source.evaluate(&mut grng, &mut frng, &sampler, pathloss, truncation_bound, stop_below)?;
            if s.stopped_early {
                continue;
            }
            let (raw, pess) = (s.sir_value, s.sir_pessimistic());
            for (k, &t) in thetas.iter().enumerate() {
                counts[k] += (raw > t) as u64;
                counts[m + k] += (pess > t) as u64;
            }
        }
        Ok(counts)
    })?;
    let mut totals = vec![0u64; 2 * m];
    for b in blocks {
        for (t, c) in totals.iter_mut().zip(b) {
            *t += c;
        }
    }
    let build = |offset: usize| -> Vec<TailEstimate> {
        thetas
            .iter()
            .enumerate()
            .map(|(k, &t)| TailEstimate::from_counts(t, totals[offset + k], n, pathloss))
            .collect()
    };
    Ok(TailCurve {
        window_radius: source.window_radius(),
        truncation_bound,
        estimates: build(0),
        pessimistic: build(m),
    })
}

/// Mean of the omitted series `Σ_{i>N} E[H] E|X_i|^{-dβ}` under Palm, `d = 2`.
fn efir_remainder(process: ConstantProcess, beta: f64, fading: &FadingModel, n: usize) -> (f64, f64) {
    let n = n as f64;
    // Σ_{i>N} Γ(i+c-b)/Γ(i+c) = Γ(N+1+c-b) / ((b-1) Γ(N+c))
    let tail = |b: f64, c: f64| {
        if n + 1.0 + c - b <= 0.0 {
            f64::INFINITY
        } else {
            (ln_gamma(n + 1.0 + c - b) - ln_gamma(n + c)).exp() / (b - 1.0)
        }
    };
    match process {
        ConstantProcess::Poisson => (
            fading.mean() * tail(beta, 0.0),
            (fading.second_moment() * tail(2.0 * beta, 0.0)).sqrt(),
        ),
        ConstantProcess::Ginibre { alpha } => (
            alpha.powf(1.0 - beta) * fading.mean() * tail(beta, 1.0),
            (alpha.powf(1.0 - 2.0 * beta) * fading.second_moment() * tail(2.0 * beta, 1.0)).sqrt(),
        ),
    }
}

/// Monte Carlo of `π_d λ E[H^{1/β}] E^o[(Σ_i H_i |X_i|^{-dβ})^{-1/β}]` in the
/// plane with `λ = 1/π`.
///
/// The series is summed over the `truncation` nearest Palm points and the
/// mean of the rest is added to every sum; `abs_error_estimate` is one
/// standard error plus a first-order bound on the error of that
/// replacement.
pub fn estimate_efir(
    process: ConstantProcess,
    beta: f64,
    fading: &FadingModel,
    n: u64,
    truncation: usize,
    seed: u64,
) -> Result<AsymptoticConstant> {
    check_beta(beta)?;
    fading.validate()?;
    if let ConstantProcess::Ginibre { alpha } = process {
        check_alpha(alpha)?;
    }
    if truncation as f64 <= beta {
        return Err(Error::Divergent(format!(
            "truncation index {truncation} must exceed beta = {beta} for the remainder moment to exist"
        )));
    }
    if n < 2 {
        return Err(domain("at least 2 replications are required"));
    }
    let sampler = fading.sampler()?;
    let (rem_mean, rem_sd) = efir_remainder(process, beta, fading, truncation);
    let inv_beta = 1.0 / beta;
    let gammas: Vec<Gamma<f64>> = match process {
        ConstantProcess::Poisson => Vec::new(),
        ConstantProcess::Ginibre { alpha } => (1..=truncation)
            .map(|i| Gamma::new(i as f64 + 1.0, alpha).map_err(|e| Error::Numerical(e.to_string())))
            .collect::<Result<_>>()?,
    };
    let blocks = run_blocks(n, |lo, hi| {
        let (mut s1, mut s2, mut sd) = (0.0, 0.0, 0.0);
        for i in lo..hi {
            let mut rng = RngStream::new(seed, i).rng();
            let mut sum = 0.0;
            match process {
                ConstantProcess::Poisson => {
                    // |X_i|² are the arrival times of a unit-rate process
                    let mut arrival = 0.0;
                    for _ in 0..truncation {
                        let gap: f64 = Exp1.sample(&mut rng);
                        arrival += gap;
                        sum += sampler.sample(&mut rng) * arrival.powf(-beta);
                    }
                }
                ConstantProcess::Ginibre { alpha } => {
                    for g in &gammas {
                        if rng.random::<f64>() < alpha {
                            sum += sampler.sample(&mut rng) * g.sample(&mut rng).powf(-beta);
                        }
                    }
                }
            }
            let total = sum + rem_mean;
            let f = total.powf(-inv_beta);
            s1 += f;
            s2 += f * f;
            sd += inv_beta * f / total;
        }
        Ok((s1, s2, sd))
    })?;
    let (mut s1, mut s2, mut sd) = (0.0, 0.0, 0.0);
    for (a, b, c) in blocks {
        s1 += a;
        s2 += b;
        sd += c;
    }
    let nf = n as f64;
    let mean = s1 / nf;
    let var = ((s2 - nf * mean * mean) / (nf - 1.0)).max(0.0);
    let frac = fading.frac_moment(beta)?;
    let stderr = frac * (var / nf).sqrt();
    let systematic = frac * (sd / nf) * rem_sd;
    let mut parameters = BTreeMap::new();
    parameters.insert("beta".into(), beta.into());
    parameters.insert("fading".into(), fading.to_string().into());
    parameters.insert("n".into(), n.into());
    parameters.insert("truncation".into(), (truncation as u64).into());
    parameters.insert("remainder_mean".into(), rem_mean.into());
    parameters.insert("stderr".into(), stderr.into());
    parameters.insert("seed".into(), seed.into());
    if let ConstantProcess::Ginibre { alpha } = process {
        parameters.insert("alpha".into(), alpha.into());
    }
    Ok(AsymptoticConstant {
        value: frac * mean,
        abs_error_estimate: stderr + systematic,
        method: Method::MonteCarlo,
        provenance: "Palm Monte Carlo of the tail constant, truncated series plus mean remainder".into(),
        parameters,
    })
}

/// One Palm replication: the circumscribed radius, enlarging the window
/// when the cell is not yet determined.
fn palm_circumradius(process: &ProcessModel, base: Option<&GinibreSampler>, rng: &mut SimRng) -> Result<f64> {
    let mut last = None;
    match *process {
        ProcessModel::Lattice { a } => {
            let t = sample_lattice_spacing(a, Mode::Palm, rng)?;
            let mut w = 4f64.max(3.0 * t);
            for _ in 0..=MAX_DOUBLINGS {
                let s = lattice_points(t, [0.0, 0.0], Mode::Palm, w)?;
                match circumscribed_radius(&s.sample, w / (2.0 * SQRT_2)) {
                    Err(e @ Error::WindowTooSmall(_)) => {
                        last = Some(e);
                        w *= 2.0;
                    }
                    other => return other,
                }
            }
        }
        ProcessModel::Poisson { .. } | ProcessModel::Ginibre { .. } => {
            let mut b = 3.0 / process.intensity().sqrt();
            for attempt in 0..=MAX_DOUBLINGS {
                let radius = 2.0 * SQRT_2 * b;
                let sample = match *process {
                    ProcessModel::Poisson { intensity } => {
                        sample_poisson_ball(intensity, 2, radius, Mode::Palm, true, rng)?
                    }
                    ProcessModel::Ginibre { alpha } => match (attempt, base) {
                        (0, Some(s)) => s.sample(true, rng),
                        _ => GinibreSampler::new(alpha, Mode::Palm, radius)?.sample(true, rng),
                    },
                    ProcessModel::Lattice { .. } => unreachable!("handled above"),
                };
                match circumscribed_radius(&sample, b) {
                    Err(e @ Error::WindowTooSmall(_)) => {
                        last = Some(e);
                        b *= 2.0;
                    }
                    other => return other,
                }
            }
        }
    }
    Err(last.unwrap_or(Error::WindowTooSmall(0.0)))
}

/// Circumscribed radii of the typical Voronoi cell for `n` Palm
/// replications, in replication order.
///
/// Ginibre angles are independent and uniform, so the Ginibre cells follow
/// the exact radial law but only approximate the joint law of the points.
pub fn sample_circumradii(process: &ProcessModel, n: u64, seed: u64) -> Result<Vec<f64>> {
    process.validate()?;
    let base = match *process {
        ProcessModel::Ginibre { alpha } => {
            let b = 3.0 / process.intensity().sqrt();
            Some(GinibreSampler::new(alpha, Mode::Palm, 2.0 * SQRT_2 * b)?)
        }
        _ => None,
    };
    let blocks = run_blocks(n, |lo, hi| {
        (lo..hi)
            .map(|i| palm_circumradius(process, base.as_ref(), &mut RngStream::new(seed, i).rng()))
            .collect::<Result<Vec<f64>>>()
    })?;
    Ok(blocks.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircumTailPoint {
    pub r: f64,
    pub p_hat: f64,
    pub stderr: f64,
}

fn empirical_tail(values: &[f64], r: f64) -> CircumTailPoint {
    let n = values.len() as f64;
    let p = values.iter().filter(|&&v| v > r).count() as f64 / n;
    CircumTailPoint { r, p_hat: p, stderr: (p * (1.0 - p) / n).sqrt() }
}

/// Empirical `P^o(R(o) > r)` on a grid of radii.
pub fn estimate_circumradius_tail(
    process: &ProcessModel,
    r_grid: &[f64],
    n: u64,
    seed: u64,
) -> Result<Vec<CircumTailPoint>> {
    if n == 0 {
        return Err(domain("at least one replication is required"));
    }
    let radii = sample_circumradii(process, n, seed)?;
    Ok(r_grid.iter().map(|&r| empirical_tail(&radii, r)).collect())
}

/// Heavy-tail signature of `R(o)²` for the Palm mixed lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub a: f64,
    pub n: u64,
    /// Least-squares slope of `log P^o(R(o)² > x)` against `log x`.
    pub slope: f64,
    pub slope_expected: f64,
    pub x_grid: Vec<f64>,
    pub tail: Vec<f64>,
    pub n_early: u64,
    pub running_mean_early: f64,
    pub running_mean_final: f64,
}

/// Palm mixed lattice with index `a`: tail slope of `R(o)²` on
/// `x ∈ [10, 10³]` and the running mean of `R(o)²` after `n_early` and `n`
/// replications.
pub fn lattice_counterexample(a: f64, n: u64, n_early: u64, seed: u64) -> Result<CounterexampleReport> {
    check_lattice_a(a)?;
    if n_early == 0 || n_early > n {
        return Err(domain("need 0 < n_early <= n"));
    }
    let r = sample_circumradii(&ProcessModel::Lattice { a }, n, seed)?;
    let sq: Vec<f64> = r.iter().map(|v| v * v).collect();
    let x_grid: Vec<f64> = (0..=8).map(|k| 10f64.powf(1.0 + k as f64 / 4.0)).collect();
    let tail: Vec<f64> = x_grid.iter().map(|&x| empirical_tail(&sq, x).p_hat).collect();
    let pts: Vec<(f64, f64)> = x_grid
        .iter()
        .zip(&tail)
        .filter(|(_, &p)| p > 0.0)
        .map(|(&x, &p)| (x.ln(), p.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InsufficientConfiguration("too few nonzero tail values for a slope".into()));
    }
    let m = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / m, pts.iter().map(|p| p.1).sum::<f64>() / m);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let mean = |k: usize| sq[..k].iter().sum::<f64>() / k as f64;
    Ok(CounterexampleReport {
        a,
        n,
        slope: sxy / sxx,
        slope_expected: -a / 2.0,
        x_grid,
        tail,
        n_early,
        running_mean_early: mean(n_early as usize),
        running_mean_final: mean(n as usize),
    })
}

/// Empirical Palm moment `E^o|X_k|^d` of the `k`-th nearest point in the
/// plane, with its standard error.
pub fn palm_point_moment(process: &ProcessModel, k: usize, n: u64, seed: u64) -> Result<(f64, f64)> {
    process.validate()?;
    if k == 0 || n < 2 {
        return Err(domain("need k >= 1 and n >= 2"));
    }
    let blocks = run_blocks(n, |lo, hi| {
        let mut acc = (0.0, 0.0);
        for i in lo..hi {
            let mut rng = RngStream::new(seed, i).rng();
            let mut radius = ((k as f64 + 10.0 * (k as f64).sqrt() + 10.0) / (PI * process.intensity())).sqrt();
            let v = loop {
                let s = match *process {
                    ProcessModel::Poisson { intensity } => {
                        sample_poisson_ball(intensity, 2, radius, Mode::Palm, false, &mut rng)?
                    }
                    ProcessModel::Ginibre { alpha } => {
                        GinibreSampler::new(alpha, Mode::Palm, radius)?.sample(false, &mut rng)
                    }
                    ProcessModel::Lattice { a } => {
                        let t = sample_lattice_spacing(a, Mode::Palm, &mut rng)?;
                        lattice_points(t, [0.0, 0.0], Mode::Palm, radius.max(3.0 * t))?.sample
                    }
                };
                let complete = match *process {
                    ProcessModel::Lattice { .. } => s.window_radius / SQRT_2,
                    _ => s.window_radius,
                };
                match s.radii.get(k - 1) {
                    Some(&r) if r <= complete => break r * r,
                    _ => radius *= 2.0,
                }
            };
            acc.0 += v;
            acc.1 += v * v;
        }
        Ok(acc)
    })?;
    let (s1, s2) = blocks.into_iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let nf = n as f64;
    let mean = s1 / nf;
    let var = ((s2 - nf * mean * mean) / (nf - 1.0)).max(0.0);
    Ok((mean, (var / nf).sqrt()))
}
