use thiserror::Error;

/// Errors raised by state construction, criteria evaluation and the optimizers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid rank {rank} for local dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },

    #[error("observable is not Hermitian (max deviation {0:.3e})")]
    InvalidObservable(f64),

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    #[error("invalid dimensionality vector: {0}")]
    InvalidVector(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("quantum Fisher information vanishes; the precision bound is unbounded")]
    Unbounded,

    #[error("readout variance {0:.3e} is too small; sensitivity is undefined")]
    UndefinedSensitivity(f64),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("state file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
