use thiserror::Error;

pub type Result<T> = std::result::Result<T, IcsError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IcsError {
    #[error("empty input")]
    EmptyInput,

    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in input")]
    NonFinite,

    #[error("sample covariance is singular")]
    SingularCovariance,

    #[error("input has zero variance")]
    ZeroVariance,

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("iteration did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("every candidate subset was degenerate")]
    AllCandidatesDegenerate,

    #[error("direction vector is zero")]
    ZeroVector,

    #[error("denominator spread is zero")]
    ZeroDenominator,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
