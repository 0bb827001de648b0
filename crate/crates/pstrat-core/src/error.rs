//! Error type shared by every module in the crate.

use alloc::string::String;
use core::fmt;

/// Errors produced by sampling construction, analysis, and parsing.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A numeric argument is outside its mathematical domain.
    Domain(String),
    /// Subspace-notation text could not be parsed; `position` is the byte
    /// offset of the offending character.
    Parse { position: usize, message: String },
    /// The dimensions declared by a notation string or design do not match
    /// the expected total.
    DimensionMismatch { declared: usize, expected: usize },
    /// A design spec violates a structural invariant (divisibility,
    /// coverage, counts).
    InvalidDesign(String),
    /// A cell enumeration would exceed the configured guard.
    CellGuard { cells: u64, limit: u64 },
    /// Sample weights failed to normalize within tolerance.
    WeightContract { sum: f64 },
    /// Latinized stratification could not be verified after retrying.
    LssConstruction { retries: u32 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Parse { position, message } => {
                write!(f, "parse error at byte {position}: {message}")
            }
            Error::DimensionMismatch { declared, expected } => write!(
                f,
                "dimension mismatch: notation declares {declared} variables, expected {expected}"
            ),
            Error::InvalidDesign(msg) => write!(f, "invalid design: {msg}"),
            Error::CellGuard { cells, limit } => {
                write!(f, "cell enumeration of {cells} cells exceeds guard of {limit}")
            }
            Error::WeightContract { sum } => {
                write!(f, "weights sum to {sum}, violating normalization beyond 1e-9")
            }
            Error::LssConstruction { retries } => write!(
                f,
                "latinized stratification failed verification after {retries} retries"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
