//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by validation, sampling and the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{field}: matrix is not Hermitian (max deviation {deviation:.3e})")]
    NonHermitian { field: String, deviation: f64 },

    #[error("{field}: matrix is not positive semi-definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { field: String, min_eigenvalue: f64 },

    #[error("{field}: dimension mismatch, expected {expected}, found {found}")]
    DimensionMismatch {
        field: String,
        expected: usize,
        found: usize,
    },

    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("sample count must be at least 1, got {0}")]
    BadCount(usize),

    #[error("evaluation produced a non-finite value at sample {index}")]
    Evaluation { index: usize },

    #[error("numerical consistency violated: {0}")]
    NumericalConsistency(String),

    #[error("generalized Rayleigh quotient denominator is singular (min eigenvalue {min_eigenvalue:.3e})")]
    SingularDenominator { min_eigenvalue: f64 },

    #[error("expected inflation-factor Jacobian block is singular (condition number {condition:.3e})")]
    SingularExpectation { condition: f64 },

    #[error("config {location}: {message}")]
    Config { location: String, message: String },

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    /// True for errors caused by bad input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::NonHermitian { .. }
                | Error::NotPsd { .. }
                | Error::DimensionMismatch { .. }
                | Error::InvalidParameter { .. }
                | Error::BadCount(_)
                | Error::Config { .. }
        )
    }

    /// True for failures of the numerical routines on valid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Evaluation { .. }
                | Error::NumericalConsistency(_)
                | Error::SingularDenominator { .. }
                | Error::SingularExpectation { .. }
        )
    }

    pub(crate) fn dims(field: impl Into<String>, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            field: field.into(),
            expected,
            found,
        }
    }

    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
