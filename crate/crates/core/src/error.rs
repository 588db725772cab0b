use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("exponent must be at least 1, got {0}")]
    InvalidExponent(f64),
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("depth {depth} outside the supported range 1..={max}")]
    DepthOutOfRange { depth: usize, max: usize },
    #[error("level {level} exceeds depth {depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("table length {got} does not match 2^{depth} x {dim}")]
    TableShape {
        depth: usize,
        dim: usize,
        got: usize,
    },
    #[error("extreme points are only enumerable for p = 1 or p = infinity")]
    UnsupportedSpace,
    #[error("exact enumeration of {requested} signs exceeds the cap of {cap}; use Monte Carlo mode or raise --exact-cap")]
    ExactCapExceeded { requested: usize, cap: usize },
    #[error("terminal value has vanishing L_q norm; ratio undefined")]
    UndefinedRatio,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("nonpositive value {0} cannot be fitted on a log scale")]
    NonPositive(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("internal consistency check failed: {0}")]
    Internal(&'static str),
}
