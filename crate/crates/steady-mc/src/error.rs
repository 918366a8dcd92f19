//! Library error type.

use std::fmt;

/// Errors reported by constructors and estimators.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violated a documented precondition.
    InvalidParameter(String),
    /// A tail sum was requested for an envelope without an analytic tail bound.
    NoTailBound,
    /// The truncation loop could not certify the requested tolerance within
    /// the term budget; retry with a looser tolerance.
    TailTolerance { requested: f64, achieved: f64 },
    /// A run would need more transition steps than fit in a 64-bit counter.
    HorizonOverflow,
    /// Numerical factorization failed (matrix not positive definite).
    NotPositiveDefinite,
    /// Empty input where at least one observation is required.
    EmptyInput,
    /// Experiment configuration problem, with the offending field named.
    Config(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::NoTailBound => {
                write!(f, "custom decay envelope has no analytic tail bound")
            }
            Error::TailTolerance {
                requested,
                achieved,
            } => write!(
                f,
                "tail sum truncation reached its term budget at relative error \
                 {achieved:.3e} (requested {requested:.3e}); loosen the tolerance"
            ),
            Error::HorizonOverflow => {
                write!(f, "simulation horizon overflows the step counter")
            }
            Error::NotPositiveDefinite => {
                write!(f, "matrix is not positive definite")
            }
            Error::EmptyInput => write!(f, "empty input"),
            Error::Config(msg) => write!(f, "config error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
