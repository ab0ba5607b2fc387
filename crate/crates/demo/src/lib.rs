//! Browser bindings: point samples, a Monte Carlo tail curve next to its
//! asymptote, and the tail constants. Each operation returns JSON text.
//!
//! The `*_json` functions are plain Rust so they can be tested natively; the
//! exported wrappers only convert errors to JavaScript values.

use serde::Serialize;
use serde_json::json;
use sirtail_core::asymptotics::{ginibre_tail_constant, poisson_tail_constant, GinibreOptions};
use sirtail_core::fading::FadingModel;
use sirtail_core::montecarlo::{scaled_tail_curve, TailConfig, WindowPolicy};
use sirtail_core::pathloss::PathLossModel;
use sirtail_core::pointproc::{sample_lattice_mixture, sample_poisson_ball, GinibreSampler, Mode, ProcessModel};
use sirtail_core::rng::RngStream;
use wasm_bindgen::prelude::*;

/// Replication cap that keeps the page responsive on one thread.
pub const MAX_REPLICATIONS: u64 = 200_000;

fn parse<T: std::str::FromStr>(what: &str, s: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e| format!("{what}: {e}"))
}

fn to_text<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

/// Stationary or Palm points of `process` in a disk of radius `window`.
pub fn sample_points_json(process: &str, palm: bool, window: f64, seed: u64) -> Result<String, String> {
    let process: ProcessModel = parse("process", process)?;
    if !(window > 0.0 && window <= 50.0) {
        return Err("window must lie in (0, 50]".into());
    }
    let mode = if palm { Mode::Palm } else { Mode::Stationary };
    let mut rng = RngStream::new(seed, 0).rng();
    let s = match process {
        ProcessModel::Poisson { intensity } => sample_poisson_ball(intensity, 2, window, mode, true, &mut rng),
        ProcessModel::Ginibre { alpha } => GinibreSampler::new(alpha, mode, window).map(|g| g.sample(true, &mut rng)),
        ProcessModel::Lattice { a } => sample_lattice_mixture(a, mode, window, &mut rng).map(|l| l.sample),
    }
    .map_err(|e| e.to_string())?;
    to_text(&s)
}

/// Tail constant of `process` (`poisson` or `ginibre:α`) under `fading`,
/// with quadrature tolerances loosened 100-fold.
pub fn tail_constant_json(process: &str, beta: f64, fading: &str) -> Result<String, String> {
    let process: ProcessModel = parse("process", process)?;
    let fading: FadingModel = parse("fading", fading)?;
    let c = match process {
        ProcessModel::Poisson { .. } => poisson_tail_constant(beta),
        ProcessModel::Ginibre { alpha } => {
            ginibre_tail_constant(alpha, beta, &fading, GinibreOptions::default().scaled(100.0))
        }
        ProcessModel::Lattice { .. } => return Err("tail constants exist for poisson and ginibre only".into()),
    }
    .map_err(|e| e.to_string())?;
    to_text(&c)
}

/// `P(SIR > θ)` on a log grid of `points` thresholds in `[θ_min, θ_max]`,
/// with the power-law asymptote `C θ^{-1/β}` when a constant exists.
#[allow(clippy::too_many_arguments)]
pub fn tail_curve_json(
    process: &str,
    fading: &str,
    pathloss: &str,
    theta_min: f64,
    theta_max: f64,
    points: u32,
    n: u64,
    seed: u64,
) -> Result<String, String> {
    let process: ProcessModel = parse("process", process)?;
    let fading: FadingModel = parse("fading", fading)?;
    let pathloss: PathLossModel = parse("pathloss", pathloss)?;
    if !(theta_min > 0.0 && theta_max > theta_min) || !(2..=40).contains(&points) {
        return Err("need 0 < theta_min < theta_max and 2 to 40 points".into());
    }
    if n > MAX_REPLICATIONS {
        return Err(format!("at most {MAX_REPLICATIONS} replications in the browser"));
    }
    let step = (theta_max / theta_min).ln() / (points - 1) as f64;
    let thetas: Vec<f64> = (0..points).map(|k| theta_min * (step * k as f64).exp()).collect();
    let cfg = TailConfig { process, fading, pathloss, window: WindowPolicy::default(), n, seed };
    let curve = scaled_tail_curve(&cfg, &thetas).map_err(|e| e.to_string())?;
    let constant = match (process, pathloss) {
        (_, PathLossModel::PowerLaw { d: 2, beta }) => match process {
            ProcessModel::Poisson { .. } => poisson_tail_constant(beta).ok(),
            ProcessModel::Ginibre { alpha } if fading.has_closed_form_laplace() => {
                ginibre_tail_constant(alpha, beta, &fading, GinibreOptions::default().scaled(1000.0)).ok()
            }
            _ => None,
        },
        _ => None,
    };
    let asymptote: Option<Vec<f64>> = constant
        .as_ref()
        .map(|c| thetas.iter().map(|t| c.value * t.powf(-1.0 / pathloss.beta())).collect());
    to_text(&json!({
        "curve": curve,
        "constant": constant.map(|c| c.value),
        "asymptote": asymptote,
    }))
}

#[wasm_bindgen]
pub fn sample_points(process: &str, palm: bool, window: f64, seed: u32) -> Result<String, JsValue> {
    sample_points_json(process, palm, window, seed as u64).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn tail_constant(process: &str, beta: f64, fading: &str) -> Result<String, JsValue> {
    tail_constant_json(process, beta, fading).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn tail_curve(
    process: &str,
    fading: &str,
    pathloss: &str,
    theta_min: f64,
    theta_max: f64,
    points: u32,
    n: u32,
    seed: u32,
) -> Result<String, JsValue> {
    tail_curve_json(process, fading, pathloss, theta_min, theta_max, points, n as u64, seed as u64)
        .map_err(|e| JsValue::from_str(&e))
}
