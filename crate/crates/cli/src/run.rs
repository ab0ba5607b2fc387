//! Command execution. Every command renders its artifact to a string, so
//! the same code path serves files, standard output and tests.

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::json;
use sirtail_core::acceptance::{run_all, run_criterion, CriterionReport, Tier};
use sirtail_core::asymptotics::{
    bounded_lower_exponent, bounded_upper_exponent, ginibre_tail_constant, nakagami_ginibre_constant,
    poisson_tail_constant, ConstantProcess, GinibreOptions,
};
use sirtail_core::fading::FadingModel;
use sirtail_core::montecarlo::{estimate_efir, lattice_counterexample, scaled_tail_curve, TailConfig, WindowPolicy};
use sirtail_core::output::{to_json, write_tail_csv};
use sirtail_core::pathloss::PathLossModel;
use sirtail_core::pointproc::{sample_lattice_mixture, sample_poisson_ball, GinibreSampler, Mode, ProcessModel};
use sirtail_core::rng::RngStream;
use sirtail_core::vbounds::{calka_poisson_bound, crossing_radius, ginibre_circumradius_bound, u_alpha, v_alpha};

use crate::config::{BoundKind, Command, ConstantMethod, Format, RunConfig, SampleMode, TierArg};

/// Rendered artifact plus whether the run succeeded.
pub struct Outcome {
    pub text: String,
    pub success: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, success: true }
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str, command: &str) -> Result<T> {
    v.ok_or_else(|| anyhow!("{command} needs --{flag}"))
}

fn envelope<R: Serialize>(cfg: &RunConfig, result: &R) -> Result<String> {
    Ok(to_json(cfg, result)? + "\n")
}

fn quad_options(cfg: &RunConfig) -> Result<GinibreOptions> {
    match cfg.tol_scale {
        None => Ok(GinibreOptions::default()),
        Some(s) if s > 0.0 && s.is_finite() => Ok(GinibreOptions::default().scaled(s)),
        Some(s) => bail!("tol_scale: must be positive (got {s})"),
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        Command::Sample => sample(cfg),
        Command::Tail => tail(cfg),
        Command::Constants => constants(cfg),
        Command::Bounds => bounds(cfg),
        Command::Counterexample => counterexample(cfg),
        Command::Verify => verify(cfg),
    }
}

fn sample(cfg: &RunConfig) -> Result<Outcome> {
    let process = need(cfg.process, "process", "sample")?;
    let mode = match cfg.mode.unwrap_or(SampleMode::Stationary) {
        SampleMode::Stationary => Mode::Stationary,
        SampleMode::Palm => Mode::Palm,
    };
    let window = cfg.window.unwrap_or(5.0);
    let mut rng = RngStream::new(cfg.seed, 0).rng();
    let s = match process {
        ProcessModel::Poisson { intensity } => sample_poisson_ball(intensity, 2, window, mode, cfg.coords, &mut rng)?,
        ProcessModel::Ginibre { alpha } => GinibreSampler::new(alpha, mode, window)?.sample(cfg.coords, &mut rng),
        ProcessModel::Lattice { a } => {
            let mut s = sample_lattice_mixture(a, mode, window, &mut rng)?.sample;
            if !cfg.coords {
                s.coords = None;
            }
            s
        }
    };
    Ok(Outcome::ok(envelope(cfg, &s)?))
}

fn tail(cfg: &RunConfig) -> Result<Outcome> {
    if cfg.theta.is_empty() {
        bail!("tail needs --theta");
    }
    let tc = TailConfig {
        process: need(cfg.process, "process", "tail")?,
        fading: cfg.fading.unwrap_or(FadingModel::Exponential { mean: 1.0 }),
        pathloss: need(cfg.pathloss, "pathloss", "tail")?,
        window: cfg.window.map(|radius| WindowPolicy::Fixed { radius }).unwrap_or_default(),
        n: need(cfg.n, "n", "tail")?,
        seed: cfg.seed,
    };
    let curve = scaled_tail_curve(&tc, &cfg.theta)?;
    let text = match cfg.format {
        Format::Json => envelope(cfg, &curve)?,
        Format::Csv => {
            let mut buf = Vec::new();
            write_tail_csv(&mut buf, cfg, &curve.estimates)?;
            String::from_utf8(buf).context("CSV is not UTF-8")?
        }
    };
    Ok(Outcome::ok(text))
}

fn constants(cfg: &RunConfig) -> Result<Outcome> {
    let beta = need(cfg.beta, "beta", "constants")?;
    let process = need(cfg.process, "process", "constants")?;
    let fading = cfg.fading.unwrap_or(FadingModel::Exponential { mean: 1.0 });
    let opts = quad_options(cfg)?;
    let method = cfg.method.unwrap_or(ConstantMethod::Quadrature);
    let cp = match process {
        ProcessModel::Poisson { .. } => ConstantProcess::Poisson,
        ProcessModel::Ginibre { alpha } => ConstantProcess::Ginibre { alpha },
        ProcessModel::Lattice { .. } => bail!("process: tail constants exist for poisson and ginibre only"),
    };
    let c = match (method, cp) {
        (ConstantMethod::Quadrature, ConstantProcess::Poisson) => poisson_tail_constant(beta)?,
        (ConstantMethod::Quadrature, ConstantProcess::Ginibre { alpha }) => {
            ginibre_tail_constant(alpha, beta, &fading, opts)?
        }
        (ConstantMethod::Nakagami, ConstantProcess::Ginibre { alpha }) => match fading {
            FadingModel::Nakagami { m } => nakagami_ginibre_constant(alpha, beta, m, opts)?,
            FadingModel::Exponential { mean: 1.0 } => nakagami_ginibre_constant(alpha, beta, 1.0, opts)?,
            other => bail!("fading: the nakagami method needs nakagami:m fading (got {other})"),
        },
        (ConstantMethod::Nakagami, ConstantProcess::Poisson) => {
            bail!("method: the nakagami method applies to ginibre processes")
        }
        (ConstantMethod::MonteCarlo, p) => estimate_efir(
            p,
            beta,
            &fading,
            cfg.n.unwrap_or(100_000),
            cfg.truncation.unwrap_or(500),
            cfg.seed,
        )?,
    };
    Ok(Outcome::ok(envelope(cfg, &c)?))
}

fn bounds(cfg: &RunConfig) -> Result<Outcome> {
    let kind = cfg.bound.ok_or_else(|| {
        anyhow!("bounds needs one of --ginibre-radius, --calka, --crossing, --bounded-exponents")
    })?;
    let result = match kind {
        BoundKind::GinibreRadius => {
            let alpha = need(cfg.alpha, "alpha", "bounds --ginibre-radius")?;
            if cfg.r.is_empty() {
                bail!("bounds --ginibre-radius needs --r");
            }
            let rows = cfg
                .r
                .iter()
                .map(|&r| {
                    Ok(json!({
                        "r": r,
                        "u": u_alpha(alpha, r),
                        "v": v_alpha(alpha, r),
                        "bound": ginibre_circumradius_bound(alpha, r)?,
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            json!({ "kind": kind, "alpha": alpha, "rows": rows })
        }
        BoundKind::Calka => {
            let intensity = cfg.intensity.unwrap_or(1.0);
            if cfg.r.is_empty() {
                bail!("bounds --calka needs --r");
            }
            let rows = cfg
                .r
                .iter()
                .map(|&r| {
                    let b = calka_poisson_bound(intensity, r, None)?;
                    Ok(json!({ "r": r, "bound": b.value, "caveat": b.caveat, "r0_assumed": b.r0_assumed }))
                })
                .collect::<Result<Vec<_>>>()?;
            json!({ "kind": kind, "intensity": intensity, "rows": rows })
        }
        BoundKind::Crossing => {
            let alpha = need(cfg.alpha, "alpha", "bounds --crossing")?;
            json!({ "kind": kind, "alpha": alpha, "r": crossing_radius(alpha)? })
        }
        BoundKind::BoundedExponents => {
            let fading = cfg.fading.unwrap_or(FadingModel::Exponential { mean: 1.0 });
            let pathloss = cfg.pathloss.unwrap_or(PathLossModel::BoundedPower { d: 2, beta: 2.0 });
            let intensity = cfg.intensity.unwrap_or(1.0 / std::f64::consts::PI);
            let upper = bounded_upper_exponent(pathloss.beta(), &fading)?;
            let lower = bounded_lower_exponent(&pathloss, intensity)?;
            json!({
                "kind": kind,
                "h": pathloss.h_description(),
                "upper": upper,
                "lower": lower,
                "lower_assumes": "exponential fading with unit mean",
            })
        }
    };
    Ok(Outcome::ok(envelope(cfg, &result)?))
}

fn counterexample(cfg: &RunConfig) -> Result<Outcome> {
    let a = match cfg.process {
        Some(ProcessModel::Lattice { a }) => a,
        None => 1.5,
        Some(other) => bail!("process: the counterexample uses lattice:a (got {other})"),
    };
    let n = cfg.n.unwrap_or(100_000);
    let r = lattice_counterexample(a, n, cfg.n_early.unwrap_or(1_000.min(n)), cfg.seed)?;
    Ok(Outcome::ok(envelope(cfg, &r)?))
}

fn verify(cfg: &RunConfig) -> Result<Outcome> {
    let tier = match cfg.tier.unwrap_or(TierArg::Quick) {
        TierArg::Quick => Tier::Quick,
        TierArg::Full => Tier::Full,
    };
    let reports: Vec<CriterionReport> = match cfg.criterion {
        Some(id) if (1..=10).contains(&id) => vec![run_criterion(id, tier)],
        Some(id) => bail!("criterion: no criterion {id} (1 to 10)"),
        None => run_all(tier),
    };
    let success = reports.iter().all(|r| r.passed);
    let mut text: String = reports.iter().map(|r| format!("{r}\n")).collect();
    if cfg.output.is_some() {
        text = envelope(cfg, &reports)?;
    }
    Ok(Outcome { text, success })
}
