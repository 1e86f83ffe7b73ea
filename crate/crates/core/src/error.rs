use thiserror::Error;

/// Errors raised by divergence evaluation, centroid computation and the
/// verification harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("entry {index} = {value} is not finite and strictly positive")]
    InvalidPoint { index: usize, value: f64 },

    #[error("empty point: dimension must be at least 1")]
    EmptyPoint,

    #[error("{value:?} lies outside the domain of {name}")]
    OutsideDomain { name: String, value: Vec<f64> },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("length mismatch: {points} points vs {weights} weights")]
    LengthMismatch { points: usize, weights: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unknown divergence key: {0}")]
    UnknownKey(String),

    #[error("divergence evaluated to {0}, below the roundoff floor; generator is not convex")]
    ConvexityViolation(f64),

    #[error("{attempts} consecutive constructions left the domain")]
    ResampleExhausted { attempts: usize },

    #[error("k = {k} exceeds the number of data points ({n})")]
    TooManyClusters { k: usize, n: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
