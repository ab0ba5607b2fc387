//! Run configuration: built from flags or read from a JSON file, with the
//! same field names in both.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use sirtail_core::fading::FadingModel;
use sirtail_core::pathloss::PathLossModel;
use sirtail_core::pointproc::ProcessModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Draw one point configuration.
    Sample,
    /// Estimate P(SIR > theta) and its scalings on a threshold grid.
    Tail,
    /// Evaluate a tail constant.
    Constants,
    /// Evaluate circumradius bounds or bounded path-loss exponents.
    Bounds,
    /// Heavy-tail demonstration for the mixed lattice.
    Counterexample,
    /// Run the acceptance suite.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// u, v and the petal bound for alpha-Ginibre.
    GinibreRadius,
    /// Tail bound for the Poisson-Voronoi circumradius.
    Calka,
    /// Radius where u and v cross.
    Crossing,
    /// Upper and lower decay exponents for bounded path loss.
    BoundedExponents,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantMethod {
    /// Closed form (Poisson) or product quadrature (Ginibre).
    Quadrature,
    /// Rescaled Nakagami-m quadrature; needs `nakagami:m` fading.
    Nakagami,
    /// Palm Monte Carlo with a truncated interference series.
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMode {
    Stationary,
    Palm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TierArg {
    Quick,
    Full,
}

/// Every option of every command; each command reads the ones it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub process: Option<ProcessModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fading: Option<FadingModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pathloss: Option<PathLossModel>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub theta: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub r: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intensity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<ConstantMethod>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<SampleMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub coords: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_early: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tier: Option<TierArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criterion: Option<u8>,
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Parser)]
#[command(name = "sirtail", version, about = "SIR tail asymptotics for cellular network models")]
pub struct Cli {
    /// Command to run; optional when --config names it.
    #[arg(value_enum)]
    pub command: Option<Command>,

    /// Read the run configuration from a JSON file; flags are then not allowed.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Default, Args)]
pub struct Flags {
    /// poisson[:lambda], ginibre:alpha or lattice:a
    #[arg(long)]
    pub process: Option<String>,
    /// dirac1, exp[:mean], gamma:shape,scale, nakagami:m, lognormal:mu,sigma
    #[arg(long)]
    pub fading: Option<String>,
    /// powerlaw:d=2,beta=2, bounded:d=2,beta=2 or boundedlog:d=2,beta=2,a=1
    #[arg(long)]
    pub pathloss: Option<String>,
    /// Threshold(s), comma separated, ascending.
    #[arg(long, value_delimiter = ',')]
    pub theta: Vec<f64>,
    /// Replications.
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; SIRTAIL_THREADS overrides.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Radius or radii, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub r: Vec<f64>,
    #[arg(long)]
    pub intensity: Option<f64>,
    #[arg(long, value_enum)]
    pub bound: Option<BoundKind>,
    /// Shorthand for --bound ginibre-radius.
    #[arg(long)]
    pub ginibre_radius: bool,
    /// Shorthand for --bound calka.
    #[arg(long)]
    pub calka: bool,
    /// Shorthand for --bound crossing.
    #[arg(long)]
    pub crossing: bool,
    /// Shorthand for --bound bounded-exponents.
    #[arg(long)]
    pub bounded_exponents: bool,
    #[arg(long, value_enum)]
    pub method: Option<ConstantMethod>,
    /// Interference terms summed exactly by the Monte Carlo constant.
    #[arg(long)]
    pub truncation: Option<usize>,
    /// Multiplies every quadrature tolerance.
    #[arg(long)]
    pub tol_scale: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<SampleMode>,
    /// Fixed window radius (sample, tail); tail defaults to an automatic window.
    #[arg(long)]
    pub window: Option<f64>,
    /// Include point coordinates in samples.
    #[arg(long)]
    pub coords: bool,
    /// Replication count of the early running mean (counterexample).
    #[arg(long)]
    pub n_early: Option<u64>,
    /// Shorthand for --tier quick.
    #[arg(long)]
    pub quick: bool,
    /// Shorthand for --tier full.
    #[arg(long)]
    pub full: bool,
    #[arg(long, value_enum)]
    pub tier: Option<TierArg>,
    /// Run a single acceptance criterion.
    #[arg(long)]
    pub criterion: Option<u8>,
}

fn parse_model<T: std::str::FromStr>(what: &str, s: &Option<String>) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    s.as_deref()
        .map(|v| v.parse::<T>().map_err(|e| anyhow::anyhow!("--{what}: {e}")))
        .transpose()
}

fn one_of<T: Copy>(options: &[(bool, T)], explicit: Option<T>, what: &str) -> Result<Option<T>> {
    let set: Vec<T> = options.iter().filter(|o| o.0).map(|o| o.1).collect();
    match (set.len(), explicit) {
        (0, e) => Ok(e),
        (1, None) => Ok(Some(set[0])),
        _ => bail!("conflicting {what} flags"),
    }
}

impl RunConfig {
    pub fn from_flags(command: Command, f: &Flags) -> Result<Self> {
        let bound = one_of(
            &[
                (f.ginibre_radius, BoundKind::GinibreRadius),
                (f.calka, BoundKind::Calka),
                (f.crossing, BoundKind::Crossing),
                (f.bounded_exponents, BoundKind::BoundedExponents),
            ],
            f.bound,
            "bound",
        )?;
        let tier = one_of(&[(f.quick, TierArg::Quick), (f.full, TierArg::Full)], f.tier, "tier")?;
        let cfg = Self {
            command,
            process: parse_model("process", &f.process)?,
            fading: parse_model("fading", &f.fading)?,
            pathloss: parse_model("pathloss", &f.pathloss)?,
            theta: f.theta.clone(),
            n: f.n,
            seed: f.seed.unwrap_or_else(default_seed),
            workers: f.workers,
            format: f.format.unwrap_or_default(),
            output: f.output.clone(),
            beta: f.beta,
            alpha: f.alpha,
            r: f.r.clone(),
            intensity: f.intensity,
            bound,
            method: f.method,
            truncation: f.truncation,
            tol_scale: f.tol_scale,
            mode: f.mode,
            window: f.window,
            coords: f.coords,
            n_early: f.n_early,
            tier,
            criterion: f.criterion,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).context("invalid run configuration")?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses a command line (without the program name).
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        match (&cli.config, cli.command) {
            (Some(path), cmd) => {
                if !flags_empty(&cli.flags) {
                    bail!("--config cannot be combined with other flags");
                }
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let cfg = Self::from_json(&text)?;
                if let Some(c) = cmd.filter(|c| *c != cfg.command) {
                    bail!("command {c:?} does not match the config file's {:?}", cfg.command);
                }
                Ok(cfg)
            }
            (None, Some(cmd)) => Self::from_flags(cmd, &cli.flags),
            (None, None) => bail!("a command or --config is required"),
        }
    }

    /// Range checks with one message per offending field.
    pub fn validate(&self) -> Result<()> {
        if let Some(p) = &self.process {
            p.validate().map_err(|e| anyhow::anyhow!("process: {e}"))?;
        }
        if let Some(f) = &self.fading {
            f.validate().map_err(|e| anyhow::anyhow!("fading: {e}"))?;
        }
        if let Some(p) = &self.pathloss {
            p.validate().map_err(|e| anyhow::anyhow!("pathloss: {e}"))?;
        }
        if let Some(b) = self.beta {
            if !(b > 1.0 && b.is_finite()) {
                bail!("beta: beta must exceed 1 (got {b})");
            }
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a <= 1.0) {
                bail!("alpha: alpha must lie in (0, 1] (got {a})");
            }
        }
        if self.theta.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            bail!("theta: thresholds must be positive and finite");
        }
        if self.theta.windows(2).any(|w| w[1] < w[0]) {
            bail!("theta: thresholds must be ascending");
        }
        if self.r.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
            bail!("r: radii must be nonnegative and finite");
        }
        if self.workers == Some(0) {
            bail!("workers: must be at least 1");
        }
        if self.format == Format::Csv && self.command != Command::Tail {
            bail!("format: csv output is only available for the tail command");
        }
        Ok(())
    }
}

fn flags_empty(f: &Flags) -> bool {
    f.process.is_none()
        && f.fading.is_none()
        && f.pathloss.is_none()
        && f.theta.is_empty()
        && f.n.is_none()
        && f.seed.is_none()
        && f.workers.is_none()
        && f.format.is_none()
        && f.output.is_none()
        && f.beta.is_none()
        && f.alpha.is_none()
        && f.r.is_empty()
        && f.intensity.is_none()
        && f.bound.is_none()
        && !(f.ginibre_radius || f.calka || f.crossing || f.bounded_exponents)
        && f.method.is_none()
        && f.truncation.is_none()
        && f.tol_scale.is_none()
        && f.mode.is_none()
        && f.window.is_none()
        && !f.coords
        && f.n_early.is_none()
        && !(f.quick || f.full)
        && f.tier.is_none()
        && f.criterion.is_none()
}
