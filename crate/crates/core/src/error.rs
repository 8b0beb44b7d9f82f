use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite coordinate at index {0}")]
    NonFinite(usize),

    #[error("a tropical point needs at least 2 coordinates, found {0}")]
    TooShort(usize),

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("not an ultrametric: {0}")]
    NotUltrametric(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed linear program: {0}")]
    MalformedLp(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("classes are not separable by a tropical hyperplane")]
    NotSeparable,
}
