use thiserror::Error;

/// Errors raised by samplers, estimators and evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0}")]
    Domain(String),

    #[error("path loss r^(-d*beta) is singular at r = 0")]
    Singularity,

    #[error("insufficient configuration: {0}")]
    InsufficientConfiguration(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("heavy-tailed MGF: fading model {0} has critical exponent zeta0 = 0")]
    HeavyTailedMgf(String),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The Voronoi cell reached the bounding square; the caller should enlarge the window.
    #[error("window too small: cell of the origin reaches the bounding square (half-width {0})")]
    WindowTooSmall(f64),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

/// Checks the path-loss exponent parameter shared by every model.
pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 1.0 {
        Ok(())
    } else {
        Err(domain(format!("beta must exceed 1 (got {beta})")))
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(domain(format!("alpha must lie in (0, 1] (got {alpha})")))
    }
}

pub(crate) fn check_lattice_a(a: f64) -> Result<()> {
    if a > 1.0 && a < 2.0 {
        Ok(())
    } else {
        Err(domain(format!("a must lie in (1, 2) (got {a})")))
    }
}
