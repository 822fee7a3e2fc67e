use thiserror::Error;

/// Errors raised by the model builders and evaluators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("deformation parameter q = {0} outside (0, 1]")]
    InvalidDeformation(f64),

    #[error("truncation dimension {0} is below the minimum of 2")]
    InvalidTruncation(usize),

    #[error("series diverges: |alpha|^2 = {z} is not below the radius 1/(1-q) = {radius}")]
    DivergentSeries { z: f64, radius: f64 },

    #[error("truncation {dim} leaves tail probability {tail:e}; need at least {suggested}")]
    TruncationTooSmall { dim: usize, tail: f64, suggested: usize },

    #[error("statistic undefined: {0}")]
    UndefinedStatistic(&'static str),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("grid spacing {h} does not divide alpha = {alpha}")]
    IncommensurateGrid { h: f64, alpha: f64 },

    #[error("operator has an invariant block of size {0}; only blocks of size 1 and 2 are propagated")]
    UnsupportedBlock(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
