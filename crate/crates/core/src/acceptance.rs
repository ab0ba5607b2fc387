//! The acceptance suite: ten pass/fail criteria with fixed seeds and
//! tolerances. Monte Carlo tolerances are `3·stderr` plus the stated slack,
//! so the quick tier only shrinks `n` and loosens quadrature tolerances.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    bounded_lower_exponent, bounded_upper_exponent, ginibre_tail_constant, jensen_comparison, ConstantProcess,
    GinibreOptions,
};
use crate::error::Result;
use crate::fading::FadingModel;
use crate::montecarlo::{
    estimate_circumradius_tail, estimate_efir, lattice_counterexample, scaled_tail_curve, TailConfig, TailCurve,
    WindowPolicy,
};
use crate::pathloss::PathLossModel;
use crate::pointproc::{expected_palm_disk_count_ginibre, GinibreSampler, Mode, ProcessModel};
use crate::rng::RngStream;
use crate::sir::compute_sir_with_fading;
use crate::vbounds::{calka_poisson_bound, crossing_radius, ginibre_circumradius_bound, petal_area, petal_area_numeric};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tier {
    /// Replication counts divided by ten, quadrature tolerances times 100.
    Quick,
    /// The full replication counts.
    Full,
}

impl Tier {
    fn n(self, full: u64) -> u64 {
        match self {
            Tier::Full => full,
            Tier::Quick => full / 10,
        }
    }

    fn quad(self) -> GinibreOptions {
        match self {
            Tier::Full => GinibreOptions::default(),
            Tier::Quick => GinibreOptions::default().scaled(100.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{verdict}] criterion {:>2}: {} | {}", self.id, self.title, self.detail)
    }
}

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "Poisson scaled tail at theta=1e3 matches (beta/pi)sin(pi/beta)"),
    (2, "Poisson scaled tail is insensitive to fading"),
    (3, "Palm Monte Carlo constant matches Ginibre quadrature"),
    (4, "Ginibre constant at alpha=0.05 is close to the Poisson constant"),
    (5, "fractional-moment lower bound holds"),
    (6, "crossing radius of u and v at alpha=1"),
    (7, "circumradius tails are dominated by their bounds"),
    (8, "mixed lattice has a heavy circumradius tail"),
    (9, "bounded path loss decay rate lies in the exponent bracket"),
    (10, "exact identities"),
];

const SEED: u64 = 20_240_601;

fn poisson_unit() -> ProcessModel {
    ProcessModel::Poisson { intensity: 1.0 / PI }
}

const EXP1: FadingModel = FadingModel::Exponential { mean: 1.0 };
const PL22: PathLossModel = PathLossModel::PowerLaw { d: 2, beta: 2.0 };

fn tail_curve(process: ProcessModel, fading: FadingModel, pathloss: PathLossModel, n: u64, thetas: &[f64]) -> Result<TailCurve> {
    let cfg = TailConfig { process, fading, pathloss, window: WindowPolicy::default(), n, seed: SEED };
    scaled_tail_curve(&cfg, thetas)
}

/// Collects sub-check outcomes into one verdict.
struct Checks {
    ok: bool,
    notes: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Self { ok: true, notes: Vec::new() }
    }

    fn check(&mut self, pass: bool, note: String) {
        self.ok &= pass;
        self.notes.push(if pass { note } else { format!("{note} [x]") });
    }
}

fn criterion_1(tier: Tier) -> Result<Checks> {
    let theta = 1e3;
    let curve = tail_curve(poisson_unit(), EXP1, PL22, tier.n(1_000_000), &[theta])?;
    let e = &curve.estimates[0];
    let target = 2.0 / PI;
    let band = 3.0 * theta.sqrt() * e.stderr + 0.02;
    let mut c = Checks::new();
    c.check(
        (e.scaled_unbounded - target).abs() <= band,
        format!("n={} scaled={:.5} target={target:.5} band=±{band:.5}", e.n, e.scaled_unbounded),
    );
    Ok(c)
}

fn criterion_2(tier: Tier) -> Result<Checks> {
    let theta: f64 = 1e3;
    let fadings = [EXP1, FadingModel::Nakagami { m: 2.0 }, FadingModel::Dirac1];
    let mut est = Vec::new();
    for f in fadings {
        let e = tail_curve(poisson_unit(), f, PL22, tier.n(1_000_000), &[theta])?.estimates.remove(0);
        est.push((f, e.scaled_unbounded, theta.sqrt() * e.stderr));
    }
    let mut c = Checks::new();
    for i in 0..est.len() {
        for j in i + 1..est.len() {
            let (fi, vi, si) = est[i];
            let (fj, vj, sj) = est[j];
            let tol = 3.0 * si.hypot(sj) + 0.03;
            c.check((vi - vj).abs() <= tol, format!("{fi} {vi:.4} vs {fj} {vj:.4} (tol {tol:.4})"));
        }
    }
    Ok(c)
}

fn criterion_3(tier: Tier) -> Result<Checks> {
    let mut c = Checks::new();
    for alpha in [0.5, 1.0] {
        let q = ginibre_tail_constant(alpha, 2.0, &EXP1, tier.quad())?;
        let m = estimate_efir(ConstantProcess::Ginibre { alpha }, 2.0, &EXP1, tier.n(100_000), 500, SEED)?;
        let rel = (m.value - q.value).abs() / q.value;
        c.check(
            rel <= 0.02,
            format!("alpha={alpha}: monte-carlo {:.5}±{:.1e} quadrature {:.7} rel {:.2}%", m.value, m.abs_error_estimate, q.value, 100.0 * rel),
        );
    }
    Ok(c)
}

fn criterion_4(tier: Tier) -> Result<Checks> {
    let q = ginibre_tail_constant(0.05, 2.0, &EXP1, tier.quad())?;
    let rel = (q.value - 2.0 / PI).abs() / (2.0 / PI);
    let mut c = Checks::new();
    c.check(rel <= 0.05, format!("C={:.6} vs 2/pi={:.6} rel {:.2}%", q.value, 2.0 / PI, 100.0 * rel));
    Ok(c)
}

fn criterion_5(tier: Tier) -> Result<Checks> {
    let mut c = Checks::new();
    let mut worst = f64::INFINITY;
    let mut cases = 0;
    for alpha in [0.5, 1.0] {
        for beta in [1.5, 2.0, 4.0] {
            for f in [EXP1, FadingModel::Nakagami { m: 2.0 }] {
                let p = ConstantProcess::Ginibre { alpha };
                let value = ginibre_tail_constant(alpha, beta, &f, tier.quad())?;
                let j = jensen_comparison(p, beta, &f, tier.quad())?;
                let margin = value.value - j.lower_bound.value;
                let slack = value.abs_error_estimate + j.lower_bound.abs_error_estimate;
                worst = worst.min(margin + slack);
                cases += 1;
                if margin < -slack {
                    c.check(false, format!("alpha={alpha} beta={beta} {f}: C={:.8} < bound {:.8}", value.value, j.lower_bound.value));
                }
            }
        }
    }
    c.check(worst >= 0.0, format!("{cases} cases, smallest margin+slack {worst:.3e}"));
    Ok(c)
}

fn criterion_6() -> Result<Checks> {
    let r = crossing_radius(1.0)?;
    let mut c = Checks::new();
    c.check((r - 0.5276).abs() <= 1e-3, format!("r*={r:.6} target 0.5276±1e-3"));
    Ok(c)
}

fn criterion_7(_tier: Tier) -> Result<Checks> {
    let n = 10_000;
    let mut c = Checks::new();
    for p in estimate_circumradius_tail(&ProcessModel::Ginibre { alpha: 1.0 }, &[1.0, 1.5, 2.0], n, SEED)? {
        let b = ginibre_circumradius_bound(1.0, p.r)?;
        c.check(p.p_hat <= b + 3.0 * p.stderr, format!("ginibre r={} p={:.4} bound={:.4}", p.r, p.p_hat, b));
    }
    for p in estimate_circumradius_tail(&ProcessModel::Poisson { intensity: 1.0 }, &[2.0, 2.5, 3.0], n, SEED)? {
        let b = calka_poisson_bound(1.0, p.r, None)?.value;
        c.check(p.p_hat <= b + 3.0 * p.stderr, format!("poisson r={} p={:.2e} bound={:.2e}", p.r, p.p_hat, b));
    }
    Ok(c)
}

fn criterion_8(tier: Tier) -> Result<Checks> {
    let r = lattice_counterexample(1.5, tier.n(100_000).max(10_000), 1000, SEED)?;
    let mut c = Checks::new();
    c.check(
        (r.slope - r.slope_expected).abs() <= 0.1,
        format!("slope {:.4} expected {:.2}±0.1", r.slope, r.slope_expected),
    );
    c.check(
        r.running_mean_final > r.running_mean_early,
        format!("mean R^2 {:.3} at n={} vs {:.3} at n={}", r.running_mean_final, r.n, r.running_mean_early, r.n_early),
    );
    Ok(c)
}

fn criterion_9(tier: Tier) -> Result<Checks> {
    let pl = PathLossModel::BoundedPower { d: 2, beta: 2.0 };
    let curve = tail_curve(poisson_unit(), EXP1, pl, tier.n(10_000_000), &[10.0, 25.0])?;
    let upper = bounded_upper_exponent(2.0, &EXP1)?.value;
    let lower = bounded_lower_exponent(&pl, 1.0 / PI)?.value;
    let (lo, hi) = (upper * 0.65, lower * 1.35);
    let mut c = Checks::new();
    let mut stats = Vec::new();
    for e in &curve.estimates {
        let h = e.theta.sqrt();
        // d(-log p)/dp = -1/p
        let stat = -e.p_hat.ln() / h;
        let se = if e.p_hat > 0.0 { e.stderr / e.p_hat / h } else { f64::INFINITY };
        c.check(
            (lo..=hi).contains(&stat),
            format!("theta={} stat={stat:.4}±{se:.4} in [{lo:.4}, {hi:.4}]", e.theta),
        );
        stats.push((stat, se));
    }
    let ((s10, e10), (s25, e25)) = (stats[0], stats[1]);
    let tol = 3.0 * e10.hypot(e25);
    c.check(s25 >= s10 - tol, format!("trend {s25:.4} >= {s10:.4} - {tol:.4}"));
    Ok(c)
}

fn criterion_10(tier: Tier) -> Result<Checks> {
    let mut c = Checks::new();

    // dilation of all radii leaves the power-law SIR unchanged
    let radii = [0.7, 1.3, 2.2, 5.0];
    let fades = [0.4, 1.9, 0.8, 1.1];
    let s0 = compute_sir_with_fading(&radii, &fades, &PL22)?.sir_value;
    let scaled: Vec<f64> = radii.iter().map(|r| 3.7 * r).collect();
    let s1 = compute_sir_with_fading(&scaled, &fades, &PL22)?.sir_value;
    c.check((s1 / s0 - 1.0).abs() < 1e-12, format!("SIR dilation ratio {:.3e}", s1 / s0 - 1.0));

    // Gamma reflection: Γ(1-1/β)Γ(1+1/β) = (π/β)csc(π/β)
    let mut worst: f64 = 0.0;
    for beta in [1.5, 2.0, 4.0] {
        let v = bounded_upper_exponent(beta, &EXP1)?.value;
        worst = worst.max((v - PI / beta / (PI / beta).sin()).abs());
    }
    c.check(worst < 1e-12, format!("reflection identity error {worst:.1e}"));

    let mut worst: f64 = 0.0;
    for r in [0.1, 1.0, 2.5, 10.0] {
        worst = worst.max((petal_area_numeric(r) - petal_area(r)).abs() / (r * r));
    }
    c.check(worst < 1e-6, format!("petal area quadrature error {worst:.1e} r^2"));

    // mean counts of α-Ginibre samples: stationary s, Palm closed form
    let n = tier.n(20_000);
    let mut worst_z: f64 = 0.0;
    for alpha in [0.25, 0.5, 1.0] {
        for mode in [Mode::Stationary, Mode::Palm] {
            let sampler = GinibreSampler::new(alpha, mode, 2.5)?;
            for s in [1.0f64, 2.0, 4.0] {
                let expected = match mode {
                    Mode::Stationary => s,
                    Mode::Palm => expected_palm_disk_count_ginibre(alpha, s.sqrt())?,
                };
                let (mut m1, mut m2) = (0.0, 0.0);
                for i in 0..n {
                    let k = sampler.sample(false, &mut RngStream::new(SEED, i).rng()).count_within(s.sqrt()) as f64;
                    m1 += k;
                    m2 += k * k;
                }
                let mean = m1 / n as f64;
                let se = ((m2 / n as f64 - mean * mean).max(0.0) / n as f64).sqrt();
                worst_z = worst_z.max((mean - expected).abs() / se.max(1e-12));
            }
        }
    }
    c.check(worst_z <= 3.0, format!("Ginibre mean counts, worst |z| {worst_z:.2}"));

    // truncation soundness on the Monte Carlo configurations
    let curve = tail_curve(poisson_unit(), EXP1, PL22, tier.n(100_000), &[10.0, 100.0, 1000.0])?;
    let mut worst_z: f64 = 0.0;
    for (a, b) in curve.estimates.iter().zip(&curve.pessimistic) {
        let se = a.stderr.hypot(b.stderr).max(1e-12);
        worst_z = worst_z.max((a.p_hat - b.p_hat).abs() / se);
    }
    c.check(worst_z <= 3.0, format!("raw vs truncation-padded tails, worst |z| {worst_z:.2}"));
    Ok(c)
}

/// Runs one criterion; an evaluation error counts as a failure.
pub fn run_criterion(id: u8, tier: Tier) -> CriterionReport {
    let title = CRITERIA.iter().find(|c| c.0 == id).map(|c| c.1).unwrap_or("unknown criterion");
    let outcome = match id {
        1 => criterion_1(tier),
        2 => criterion_2(tier),
        3 => criterion_3(tier),
        4 => criterion_4(tier),
        5 => criterion_5(tier),
        6 => criterion_6(),
        7 => criterion_7(tier),
        8 => criterion_8(tier),
        9 => criterion_9(tier),
        10 => criterion_10(tier),
        _ => Err(crate::error::domain(format!("no criterion {id}"))),
    };
    let (passed, detail) = match outcome {
        Ok(c) => (c.ok, c.notes.join("; ")),
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionReport { id, title: title.to_string(), passed, detail }
}

pub fn run_all(tier: Tier) -> Vec<CriterionReport> {
    CRITERIA.iter().map(|c| run_criterion(c.0, tier)).collect()
}
