use thiserror::Error;

use crate::triple::AdaptiveTriple;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite coordinate at index {0}")]
    NonFinite(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),

    /// The acceptance loop did not stabilise within the per-iteration cap.
    #[error("iteration {iter}: no acceptance after {calls} inner calls (L = {:e}, delta = {:e}, Delta = {:e})", last.l, last.value_err, last.grad_err)]
    NonTermination {
        iter: usize,
        calls: usize,
        last: AdaptiveTriple,
    },

    /// The restart procedure exceeded its doubling cap.
    #[error("iteration {iter}: restart procedure exceeded {cap} doublings (L = {l:e})")]
    RestartCapExceeded { iter: usize, cap: usize, l: f64 },

    #[error("certificate unavailable: {0}")]
    CertificateUnavailable(String),

    #[error("inconsistent trace: {0}")]
    InconsistentTrace(String),

    /// `‖g̃‖ ≤ Δ`: the PL step size would be non-positive.
    #[error("gradient norm {g_tilde:e} does not exceed the gradient error {grad_err:e}")]
    SmallGradient { g_tilde: f64, grad_err: f64 },

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
