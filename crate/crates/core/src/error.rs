use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix must be square and non-empty, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max |A - A^H| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not positive semi-definite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("Hermitian eigensolver failed to converge")]
    EigenFailure,

    #[error("{what} is not normalized (deviation {deviation:e})")]
    NotNormalized { what: String, deviation: f64 },

    #[error("outcome {index} has probability {probability:e}; cannot condition on it")]
    ZeroProbability { index: usize, probability: f64 },

    #[error("outcome index {index} out of range for {count} outcomes")]
    OutcomeOutOfRange { index: usize, count: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("threshold {0} coincides with an eigenvalue")]
    AmbiguousThreshold(f64),

    #[error("malformed bracket tree: {0}")]
    MalformedTree(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("ancilla of dimension {got} is too small; need at least {needed}")]
    AncillaTooSmall { needed: usize, got: usize },

    #[error("inconsistent marginals: {0}")]
    InconsistentMarginals(String),

    #[error("observable spectrum must lie in {{-1, +1}}: found {0}")]
    InvalidSpectrum(f64),

    #[error("operators expected to commute do not (commutator norm {0:e})")]
    NonCommuting(f64),

    #[error("effect table with {0} outcome tuples exceeds the size limit")]
    TableTooLarge(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
