//! The SIR functional of a sampled configuration.

use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fading::{FadingModel, FadingSampler};
use crate::pathloss::PathLossModel;
use crate::pointproc::{unit_ball_volume, PointSample};

/// One evaluation of `SIR = H₁ℓ(|X₁|) / Σ_{i≥2} H_i ℓ(|X_i|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SirSample {
    pub sir_value: f64,
    pub signal: f64,
    pub interference: f64,
    /// Mean interference of the points beyond the window.
    pub truncation_bound: f64,
    /// Set when the interference sum was abandoned once the ratio fell below
    /// the caller's lowest threshold; `interference` is then partial and
    /// `sir_value` an upper bound that is still below that threshold.
    pub stopped_early: bool,
}

impl SirSample {
    /// The SIR with the truncation bound added to the interference.
    pub fn sir_pessimistic(&self) -> f64 {
        self.signal / (self.interference + self.truncation_bound)
    }
}

/// Mean interference `λ d π_d E[H] ∫_R^∞ r^{d-1} ℓ(r) dr` from points beyond
/// distance `R`, by Campbell's formula.
pub fn truncation_interference_bound(
    intensity: f64,
    fading: &FadingModel,
    pathloss: &PathLossModel,
    window_radius: f64,
) -> Result<f64> {
    if !(pathloss.beta() > 1.0) {
        return Err(Error::Divergent(format!(
            "interference tail diverges for beta = {} <= 1",
            pathloss.beta()
        )));
    }
    if !(intensity > 0.0) {
        return Err(domain(format!("intensity must be positive (got {intensity})")));
    }
    let d = pathloss.dim();
    Ok(intensity * d as f64 * unit_ball_volume(d)? * fading.mean() * pathloss.tail_integral(window_radius)?)
}

/// SIR from radii sorted by distance and the matching fading values.
pub fn compute_sir_with_fading(radii: &[f64], fading: &[f64], pathloss: &PathLossModel) -> Result<SirSample> {
    if radii.len() < 2 {
        return Err(Error::InsufficientConfiguration(format!(
            "need at least 2 points, got {}",
            radii.len()
        )));
    }
    if fading.len() != radii.len() {
        return Err(domain("one fading value per point is required"));
    }
    let signal = fading[0] * pathloss.eval(radii[0])?;
    let mut interference = 0.0;
    for (&r, &h) in radii[1..].iter().zip(&fading[1..]) {
        interference += h * pathloss.eval(r)?;
    }
    finish(signal, interference, 0.0, false)
}

fn finish(signal: f64, interference: f64, truncation_bound: f64, stopped_early: bool) -> Result<SirSample> {
    if interference <= 0.0 && truncation_bound <= 0.0 {
        return Err(Error::InsufficientConfiguration("interference is zero".into()));
    }
    Ok(SirSample { sir_value: signal / interference, signal, interference, truncation_bound, stopped_early })
}

/// SIR for the typical user of a stationary sample, with fresh i.i.d. fading.
pub fn compute_sir<R: Rng + ?Sized>(
    sample: &PointSample,
    fading: &FadingModel,
    pathloss: &PathLossModel,
    rng: &mut R,
) -> Result<SirSample> {
    if sample.is_palm {
        return Err(domain("the typical-user SIR needs a stationary sample"));
    }
    if sample.dim != pathloss.dim() {
        return Err(domain(format!(
            "sample dimension {} differs from path loss dimension {}",
            sample.dim,
            pathloss.dim()
        )));
    }
    let bound = truncation_interference_bound(sample.intensity, fading, pathloss, sample.window_radius)?;
    let sampler = fading.sampler()?;
    sir_from_radii(sample.radii.iter().copied(), &sampler, pathloss, bound, 0.0, rng)
}

/// SIR from radii in increasing order, drawing fading as it goes.
///
/// With `stop_below > 0` the interference sum stops as soon as the ratio
/// drops below `stop_below`; further points can only lower it. Radii must be
/// positive.
pub fn sir_from_radii<I, R>(
    radii: I,
    fading: &FadingSampler,
    pathloss: &PathLossModel,
    truncation_bound: f64,
    stop_below: f64,
    rng: &mut R,
) -> Result<SirSample>
where
    I: IntoIterator<Item = f64>,
    R: Rng + ?Sized,
{
    let mut it = radii.into_iter();
    let first = it
        .next()
        .ok_or_else(|| Error::InsufficientConfiguration("need at least 2 points, got 0".into()))?;
    let signal = fading.sample(rng) * pathloss.eval(first)?;
    let cap = if stop_below > 0.0 { signal / stop_below } else { f64::INFINITY };
    let mut interference = 0.0;
    let mut count = 1usize;
    for r in it {
        count += 1;
        interference += fading.sample(rng) * pathloss.eval_fast(r);
        if interference > cap {
            return finish(signal, interference, truncation_bound, true);
        }
    }
    if count < 2 {
        return Err(Error::InsufficientConfiguration("need at least 2 points, got 1".into()));
    }
    finish(signal, interference, truncation_bound, false)
}
