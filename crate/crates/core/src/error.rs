use thiserror::Error;

/// Errors produced by the sampling library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("state space too large: {states} states exceeds cap {cap}")]
    StateSpaceTooLarge { states: u128, cap: usize },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("index {index} out of range for state space of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid simplex row {row}: {reason}")]
    InvalidSimplexRow { row: usize, reason: String },

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("power iteration did not converge after {0} iterations")]
    NonConvergence(usize),

    #[error("kernel is not reversible: detailed balance residual {0:e}")]
    NonReversibleKernel(f64),

    #[error("eigenvalue numerically at 1; asymptotic variance undefined")]
    DegenerateSpectrum,

    #[error("model does not expose a certified quadratic form")]
    NotQuadratic,

    #[error("invalid proposal spec: {0}")]
    InvalidSpec(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
