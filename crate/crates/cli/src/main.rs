use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use sirtail_cli::config::{Cli, RunConfig};
use sirtail_cli::run::run;

fn threads(cfg: &RunConfig) -> Result<Option<usize>> {
    match std::env::var("SIRTAIL_THREADS") {
        Ok(v) => {
            let n: usize = v.trim().parse().with_context(|| format!("SIRTAIL_THREADS: not a count: '{v}'"))?;
            anyhow::ensure!(n > 0, "SIRTAIL_THREADS: must be at least 1");
            Ok(Some(n))
        }
        Err(_) => Ok(cfg.workers),
    }
}

fn main_inner() -> Result<bool> {
    let cli = Cli::parse();
    let cfg = RunConfig::from_cli(&cli)?;
    if let Some(n) = threads(&cfg)? {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("starting worker pool")?;
    }
    let outcome = run(&cfg)?;
    match &cfg.output {
        Some(path) => std::fs::write(path, &outcome.text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(outcome.text.as_bytes())?,
    }
    Ok(outcome.success)
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
