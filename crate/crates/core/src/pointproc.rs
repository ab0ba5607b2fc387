//! Point-process samplers: homogeneous Poisson in a ball, α-Ginibre radial
//! law via independent thinned gamma variables, and the mixed randomly
//! shifted lattice. Each comes in a stationary and a Palm version; in Palm
//! samples the point at the origin is implied and not listed.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_lr;

use crate::error::{check_alpha, check_lattice_a, domain, Error, Result};

/// Volume of the `d`-dimensional unit ball, `π^{d/2} / Γ(d/2 + 1)`.
pub fn unit_ball_volume(d: u32) -> Result<f64> {
    if d < 1 {
        return Err(domain("dimension must be at least 1"));
    }
    // V_d = V_{d-2} * 2π / d, seeded with V_0 = 1 and V_1 = 2
    let mut v = if d.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut k = if d.is_multiple_of(2) { 2 } else { 3 };
    while k <= d {
        v *= 2.0 * PI / k as f64;
        k += 2;
    }
    Ok(v)
}

/// Stationary or Palm version of a process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Stationary,
    Palm,
}

/// One realisation, listed by increasing distance from the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSample {
    pub dim: u32,
    /// Intensity of the process the sample was drawn from.
    pub intensity: f64,
    pub radii: Vec<f64>,
    pub coords: Option<Vec<[f64; 2]>>,
    pub window_radius: f64,
    pub is_palm: bool,
}

impl PointSample {
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Number of listed points at distance at most `r`.
    pub fn count_within(&self, r: f64) -> usize {
        self.radii.partition_point(|&x| x <= r)
    }

    /// Checks ordering, window containment and coordinate consistency.
    /// `strict` demands strictly increasing radii (lattices have structural ties).
    pub fn check_invariants(&self, strict: bool) -> Result<()> {
        for w in self.radii.windows(2) {
            if w[1] < w[0] || (strict && w[1] == w[0]) {
                return Err(Error::Numerical(format!("radii out of order: {} then {}", w[0], w[1])));
            }
        }
        if let Some(&last) = self.radii.last() {
            if last > self.window_radius {
                return Err(Error::Numerical(format!(
                    "radius {last} beyond window {}",
                    self.window_radius
                )));
            }
        }
        if let Some(coords) = &self.coords {
            if coords.len() != self.radii.len() {
                return Err(Error::Numerical("coords and radii differ in length".into()));
            }
            for (c, &r) in coords.iter().zip(&self.radii) {
                let norm = c[0].hypot(c[1]);
                if (norm - r).abs() > 1e-12 * r.max(1e-300) {
                    return Err(Error::Numerical(format!("|coord| = {norm} but radius {r}")));
                }
            }
        }
        Ok(())
    }
}

/// Attaches independent uniform angles to a list of radii.
fn with_uniform_angles<R: Rng + ?Sized>(radii: &[f64], rng: &mut R) -> Vec<[f64; 2]> {
    radii
        .iter()
        .map(|&r| {
            let phi = rng.random::<f64>() * 2.0 * PI;
            [r * phi.cos(), r * phi.sin()]
        })
        .collect()
}

/// Distances of a homogeneous Poisson process from the origin, in order.
///
/// The volumes `λ π_d r^d` of the balls reaching successive points are the
/// arrival times of a unit-rate Poisson process; the iterator is unbounded.
pub struct PoissonRadii<'a, R: Rng + ?Sized> {
    rng: &'a mut R,
    scale: f64,
    inv_d: f64,
    arrival: f64,
    last: f64,
}

impl<'a, R: Rng + ?Sized> PoissonRadii<'a, R> {
    pub fn new(intensity: f64, d: u32, rng: &'a mut R) -> Result<Self> {
        if !(intensity > 0.0 && intensity.is_finite()) {
            return Err(domain(format!("intensity must be positive (got {intensity})")));
        }
        let vol = unit_ball_volume(d)?;
        Ok(Self { rng, scale: 1.0 / (intensity * vol), inv_d: 1.0 / d as f64, arrival: 0.0, last: 0.0 })
    }
}

impl<R: Rng + ?Sized> Iterator for PoissonRadii<'_, R> {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        loop {
            let gap: f64 = Exp1.sample(self.rng);
            self.arrival += gap;
            let r = (self.arrival * self.scale).powf(self.inv_d);
            // equal radii only arise from a zero gap; draw again
            if r > self.last {
                self.last = r;
                return Some(r);
            }
        }
    }
}

/// Homogeneous Poisson process of intensity `λ` restricted to the ball of
/// radius `window_radius` in `R^d`. By Slivnyak's theorem the Palm version
/// is the same list with an implied point at the origin.
pub fn sample_poisson_ball<R: Rng + ?Sized>(
    intensity: f64,
    d: u32,
    window_radius: f64,
    mode: Mode,
    with_coords: bool,
    rng: &mut R,
) -> Result<PointSample> {
    if !(window_radius > 0.0) {
        return Err(domain("window radius must be positive"));
    }
    if with_coords && d != 2 {
        return Err(Error::Unsupported("coordinates are only produced for d = 2".into()));
    }
    let radii: Vec<f64> = PoissonRadii::new(intensity, d, rng)?
        .take_while(|&r| r <= window_radius)
        .collect();
    let coords = with_coords.then(|| with_uniform_angles(&radii, rng));
    Ok(PointSample {
        dim: d,
        intensity,
        radii,
        coords,
        window_radius,
        is_palm: mode == Mode::Palm,
    })
}

/// Default generation cutoff for the Ginibre sampler.
pub const GINIBRE_CUTOFF_EPS: f64 = 1e-12;

/// Radial sampler for the α-Ginibre process (intensity 1/π).
///
/// Squared moduli are `Y_i ~ Gamma(shape i, scale α)` (shape `i + 1` under
/// Palm), each kept independently with probability α. Indices stop at the
/// first `N` with `P(Y_N ≤ R²) < eps`.
#[derive(Debug, Clone)]
pub struct GinibreSampler {
    alpha: f64,
    mode: Mode,
    window_radius: f64,
    last_index: usize,
}

impl GinibreSampler {
    pub fn new(alpha: f64, mode: Mode, window_radius: f64) -> Result<Self> {
        Self::with_cutoff(alpha, mode, window_radius, GINIBRE_CUTOFF_EPS)
    }

    pub fn with_cutoff(alpha: f64, mode: Mode, window_radius: f64, eps: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(window_radius > 0.0) {
            return Err(domain("window radius must be positive"));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(domain("generation cutoff must lie in (0, 1)"));
        }
        let x = window_radius * window_radius / alpha;
        let shift = if mode == Mode::Palm { 1 } else { 0 };
        let mut i = (x.floor() as usize).max(1);
        while gamma_lr((i + shift) as f64, x) >= eps {
            i += 1;
        }
        Ok(Self { alpha, mode, window_radius, last_index: i })
    }

    /// Largest gamma index drawn per realisation.
    pub fn last_index(&self) -> usize {
        self.last_index
    }

    pub fn sample<R: Rng + ?Sized>(&self, with_coords: bool, rng: &mut R) -> PointSample {
        let shift = if self.mode == Mode::Palm { 1.0 } else { 0.0 };
        let r2max = self.window_radius * self.window_radius;
        let mut kept: Vec<(f64, usize)> = Vec::new();
        for i in 1..=self.last_index {
            if rng.random::<f64>() >= self.alpha {
                continue;
            }
            let y = self.draw(i as f64 + shift, rng);
            if y <= r2max {
                kept.push((y, i));
            }
        }
        kept.sort_by(|a, b| a.0.total_cmp(&b.0));
        // floating-point ties: redraw the later point (conditioned to stay in the window)
        while let Some(k) = kept.windows(2).position(|w| w[0].0 == w[1].0) {
            let idx = kept[k + 1].1;
            let y = loop {
                let y = self.draw(idx as f64 + shift, rng);
                if y <= r2max {
                    break y;
                }
            };
            kept[k + 1].0 = y;
            kept.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
        let radii: Vec<f64> = kept.iter().map(|p| p.0.sqrt()).collect();
        let coords = with_coords.then(|| with_uniform_angles(&radii, rng));
        PointSample {
            dim: 2,
            intensity: 1.0 / PI,
            radii,
            coords,
            window_radius: self.window_radius,
            is_palm: self.mode == Mode::Palm,
        }
    }

    fn draw<R: Rng + ?Sized>(&self, shape: f64, rng: &mut R) -> f64 {
        Gamma::new(shape, self.alpha).expect("valid gamma parameters").sample(rng)
    }
}

/// One realisation of the α-Ginibre radial law inside the disk of radius
/// `window_radius`. Angles, when requested, are independent and uniform.
pub fn sample_ginibre_radii<R: Rng + ?Sized>(
    alpha: f64,
    mode: Mode,
    window_radius: f64,
    with_coords: bool,
    rng: &mut R,
) -> Result<PointSample> {
    Ok(GinibreSampler::new(alpha, mode, window_radius)?.sample(with_coords, rng))
}

/// Mean number of points of the reduced Palm α-Ginibre process in the disk
/// of radius `r`: the integral of `(1 - e^{-|z|²/α}) / π`.
pub fn expected_palm_disk_count_ginibre(alpha: f64, r: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(r >= 0.0) {
        return Err(domain("radius must be nonnegative"));
    }
    let s = r * r;
    Ok(s + alpha * (-s / alpha).exp_m1())
}

/// Intensity `E[1/T] = (a - 1)/a` of the mixed lattice.
pub fn lattice_intensity(a: f64) -> Result<f64> {
    check_lattice_a(a)?;
    Ok((a - 1.0) / a)
}

/// Lattice realisation together with its random row spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSample {
    pub sample: PointSample,
    pub spacing: f64,
    pub shift: [f64; 2],
}

/// Points of `(Z × T Z) + shift` in the square `[-W, W]²`, sorted by
/// distance. In Palm mode the shift is ignored and the origin is omitted.
/// The sample's `window_radius` is `W √2`; every point within distance `W`
/// of the origin is listed.
pub fn lattice_points(spacing: f64, shift: [f64; 2], mode: Mode, halfwidth: f64) -> Result<LatticeSample> {
    if !(spacing >= 1.0) {
        return Err(domain("lattice row spacing must be at least 1"));
    }
    if !(halfwidth > 0.0) {
        return Err(domain("window half-width must be positive"));
    }
    let shift = if mode == Mode::Palm { [0.0, 0.0] } else { shift };
    let m_lo = (-halfwidth - shift[0]).ceil() as i64;
    let m_hi = (halfwidth - shift[0]).floor() as i64;
    let k_lo = ((-halfwidth - shift[1]) / spacing).ceil() as i64;
    let k_hi = ((halfwidth - shift[1]) / spacing).floor() as i64;
    let mut pts: Vec<(f64, [f64; 2])> = Vec::new();
    for k in k_lo..=k_hi {
        let y = k as f64 * spacing + shift[1];
        for m in m_lo..=m_hi {
            if mode == Mode::Palm && m == 0 && k == 0 {
                continue;
            }
            let x = m as f64 + shift[0];
            pts.push((x.hypot(y), [x, y]));
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let intensity = 1.0 / spacing;
    Ok(LatticeSample {
        sample: PointSample {
            dim: 2,
            intensity,
            radii: pts.iter().map(|p| p.0).collect(),
            coords: Some(pts.into_iter().map(|p| p.1).collect()),
            window_radius: halfwidth * std::f64::consts::SQRT_2,
            is_palm: mode == Mode::Palm,
        },
        spacing,
        shift,
    })
}

/// Row spacing `T` of the mixed lattice: density `(a-1) t^{-a}` on `[1, ∞)`
/// when stationary, and the size-biased density `a t^{-a-1}` under Palm.
pub fn sample_lattice_spacing<R: Rng + ?Sized>(a: f64, mode: Mode, rng: &mut R) -> Result<f64> {
    check_lattice_a(a)?;
    let index = match mode {
        Mode::Stationary => a - 1.0,
        Mode::Palm => a,
    };
    // 1 - U lies in (0, 1]
    let u = 1.0 - rng.random::<f64>();
    Ok(u.powf(-1.0 / index))
}

/// Mixed and randomly shifted lattice `(Z × T Z) + U_T` in `[-W, W]²`.
pub fn sample_lattice_mixture<R: Rng + ?Sized>(
    a: f64,
    mode: Mode,
    halfwidth: f64,
    rng: &mut R,
) -> Result<LatticeSample> {
    let spacing = sample_lattice_spacing(a, mode, rng)?;
    let shift = [rng.random::<f64>(), rng.random::<f64>() * spacing];
    lattice_points(spacing, shift, mode, halfwidth)
}

/// Point-process descriptor: `poisson[:λ]`, `ginibre:α`, `lattice:a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProcessModel {
    Poisson { intensity: f64 },
    Ginibre { alpha: f64 },
    Lattice { a: f64 },
}

impl ProcessModel {
    pub fn intensity(&self) -> f64 {
        match *self {
            Self::Poisson { intensity } => intensity,
            Self::Ginibre { .. } => 1.0 / PI,
            Self::Lattice { a } => (a - 1.0) / a,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Poisson { intensity } if !(intensity > 0.0 && intensity.is_finite()) => {
                Err(domain(format!("intensity must be positive (got {intensity})")))
            }
            Self::Poisson { .. } => Ok(()),
            Self::Ginibre { alpha } => check_alpha(alpha),
            Self::Lattice { a } => check_lattice_a(a),
        }
    }
}

impl fmt::Display for ProcessModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Poisson { intensity } => write!(f, "poisson:{intensity}"),
            Self::Ginibre { alpha } => write!(f, "ginibre:{alpha}"),
            Self::Lattice { a } => write!(f, "lattice:{a}"),
        }
    }
}

impl FromStr for ProcessModel {
    type Err = Error;

    /// A bare `poisson` has intensity 1/π, matching the Ginibre processes.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let num = |a: Option<&str>, what: &str| -> Result<f64> {
            let a = a.ok_or_else(|| Error::Parse(format!("{kind} needs a parameter ({what})")))?;
            a.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("invalid {what} in process descriptor '{s}'")))
        };
        let model = match kind.to_ascii_lowercase().as_str() {
            "poisson" => Self::Poisson {
                intensity: match arg {
                    Some(_) => num(arg, "intensity")?,
                    None => 1.0 / PI,
                },
            },
            "ginibre" => Self::Ginibre { alpha: num(arg, "alpha")? },
            "lattice" => Self::Lattice { a: num(arg, "a")? },
            _ => return Err(Error::Parse(format!("unknown process descriptor '{s}'"))),
        };
        model.validate()?;
        Ok(model)
    }
}

crate::impl_serde_via_str!(ProcessModel);
