//! Error type shared by every module.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature did not converge: best estimate {estimate} with error estimate {error_estimate:e}")]
    NoConvergence {
        estimate: Complex64,
        error_estimate: f64,
    },
    #[error("degenerate stationary point: {0}")]
    Degenerate(String),
    #[error("root not bracketed: {0}")]
    NotBracketed(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn check_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        domain(format!("{name} must be finite, got {x}"))
    }
}
