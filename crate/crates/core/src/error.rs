use thiserror::Error;

/// Errors raised at the library's contract boundaries.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value {value} in {what}")]
    NonFinite { what: &'static str, value: f64 },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("transform size {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("{0}")]
    Contract(String),
}

pub type Result<T> = std::result::Result<T, Error>;
