use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OampError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("variance must be positive, got {0}")]
    NonPositiveVariance(f64),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("degenerate linear estimator: tr(W A) = {0}")]
    DegenerateEstimator(f64),

    /// mmse is not strictly below the input variance, so the harmonic
    /// SE expression (or the optimal scale C) is undefined.
    #[error("mmse {mmse} is not below input variance {variance}")]
    MmseDomain { mmse: f64, variance: f64 },

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("root bracket failure: {0}")]
    Bracket(String),

    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for OampError {
    fn from(e: std::io::Error) -> Self {
        OampError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, OampError>;
