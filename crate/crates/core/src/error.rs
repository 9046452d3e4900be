use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A parameter lies outside the interval where the requested object exists.
    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    /// The computation finished but cannot decide the question asked of it.
    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("configuration error: {0}")]
    Configuration(String),
}
