use thiserror::Error;

/// Errors produced by the estimation and bound-evaluation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("bandwidth must be strictly positive, got {0}")]
    NonPositiveBandwidth(f64),

    #[error("all kernel weights are zero at z = {z:?}: the estimator is undefined there")]
    AllWeightsZero { z: Vec<f64> },

    #[error("degenerate window at z = {z:?}: a single observation carries all weight (s_n = 1)")]
    DegenerateWindow { z: Vec<f64> },

    #[error("sample too small: need at least {need} observations, got {got}")]
    SampleTooSmall { need: usize, got: usize },

    #[error("condition violated: {0}")]
    ConditionViolated(String),

    #[error("the covariate column has zero variance")]
    ZeroVariance,

    #[error("fewer than {need} observations carry nonzero weight at z = {z:?}")]
    TooFewEffective { need: usize, z: Vec<f64> },

    #[error("density estimate is zero at z = {z:?}")]
    ZeroDensity { z: Vec<f64> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("csv error at line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
