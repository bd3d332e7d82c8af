use thiserror::Error;

/// Errors produced by the splitting library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite iterate at step {step}")]
    Diverged { step: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("trace too short: need at least {needed} rows, have {have}")]
    TraceTooShort { needed: usize, have: usize },

    #[error("no convergence after {iterations} iterations (last step length {last_step:e})")]
    NoConvergence { iterations: usize, last_step: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
