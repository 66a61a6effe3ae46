use thiserror::Error;

/// Errors raised by the matrix kernel, state constructors and measures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |h - h†| = {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("function undefined at eigenvalue {eigenvalue}")]
    Domain { eigenvalue: f64 },

    #[error("invalid probabilities: {0}")]
    InvalidProbabilities(String),

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("bisection failed: {0}")]
    BisectionFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
