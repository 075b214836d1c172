use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("not a probability vector: {0}")]
    NotProbability(String),

    #[error("{part} part of the signal has no mass (sum = {mass:e})")]
    ZeroMassPart { part: SignPart, mass: f64 },

    #[error("target point {point} lies outside the source support [{min}, {max}]")]
    OutOfRange { point: f64, min: f64, max: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("no built-in smoothness constants for cost exponent p = {0}")]
    UnknownSmoothness(f64),

    #[error("size {n} is not n_min * 2^m with n_min = {n_min}")]
    BadSize { n: usize, n_min: usize },

    #[error("rank selection diverges: alpha * eta / 4 = {0} >= 1")]
    DivergentRank(f64),

    #[error("nonpositive denominator {value:e} at index {index} in iteration {iteration}")]
    NonpositiveDenominator {
        index: usize,
        iteration: usize,
        value: f64,
    },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    MaxIterExceeded { iterations: usize, residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

/// Which sign of a signed signal an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignPart {
    Positive,
    Negative,
}

impl std::fmt::Display for SignPart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SignPart::Positive => f.write_str("positive"),
            SignPart::Negative => f.write_str("negative"),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
