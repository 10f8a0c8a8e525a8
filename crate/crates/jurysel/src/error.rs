//! Crate-wide error type.

use std::fmt;

/// Errors raised by distribution construction, solver lookups, oracle
/// preconditions, and experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside its mathematical domain.
    Domain(String),
    /// Distribution parameters violate an invariant (weights, bounds, shape).
    InvalidDistribution(String),
    /// A subgame key outside the solved table.
    OutOfBounds(String),
    /// Input the requested operation does not support.
    Unsupported(String),
    /// An experiment configuration failed validation.
    InvalidConfig(String),
    /// Oracle pre-flight checks did not pass.
    OracleCheck(String),
    /// Underlying I/O failure, carried as a message.
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::InvalidDistribution(msg) => write!(f, "invalid distribution: {msg}"),
            Error::OutOfBounds(msg) => write!(f, "out of bounds: {msg}"),
            Error::Unsupported(msg) => write!(f, "unsupported input: {msg}"),
            Error::InvalidConfig(msg) => write!(f, "config error: {msg}"),
            Error::OracleCheck(msg) => write!(f, "oracle check failed: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
