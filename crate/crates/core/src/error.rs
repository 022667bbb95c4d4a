use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("total order unavailable for the {0} backend")]
    OrderUnavailable(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid exponent p = {0}; p must be at least 1")]
    InvalidP(f64),

    #[error("invalid direct-sum weight {0}; the weight must be positive")]
    InvalidWeight(f64),

    #[error("path algebra is infinite dimensional or exceeds the bound of {bound} paths")]
    InfiniteDimensional { bound: usize },

    #[error("malformed relation: {0}")]
    MalformedRelation(String),

    #[error("malformed quiver: {0}")]
    MalformedQuiver(String),

    #[error("malformed algebra: {0}")]
    MalformedAlgebra(String),

    #[error("point {0} lies outside the measure domain")]
    OutOfDomain(String),

    #[error("cell index {index} out of range for level {level}")]
    IndexOutOfRange { index: usize, level: u32 },

    #[error("level {level} exceeds the maximum level {max} for dimension {dim}")]
    LevelOverflow { level: u32, max: u32, dim: usize },

    #[error("step functions are at mixed levels or dimensions")]
    MixedLevels,

    #[error("scalar backends differ: {0} vs {1}")]
    MixedBackends(&'static str, &'static str),

    #[error("cannot split a level-0 step function")]
    LevelZero,

    #[error("expected {expected} parts, found {found}")]
    WrongPartCount { expected: usize, found: usize },

    #[error("evaluation failure: {0}")]
    EvaluationFailure(String),

    #[error("total measure of the box is zero")]
    ZeroTotalMeasure,

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid target object: {0}")]
    TargetInvalid(String),

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
