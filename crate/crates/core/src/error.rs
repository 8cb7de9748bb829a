//! The single error type shared by every module.

use alloc::string::String;
use alloc::vec::Vec;

/// Failure modes of the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Input data violates a documented invariant; `field` names the offender.
    #[error("invalid `{field}`: {reason}")]
    Validation {
        /// Dotted name of the offending field or argument.
        field: String,
        /// Human-readable explanation.
        reason: String,
    },
    /// A method could not certify the requested accuracy.
    #[error("accuracy target missed in {context}: estimated error {estimate:e}")]
    Accuracy {
        /// The method's own error estimate.
        estimate: f64,
        /// Which computation failed.
        context: &'static str,
    },
    /// An iteration stopped before reaching its tolerance.
    #[error("{context} did not converge after {iterations} iterations (last residual {residual:e})")]
    Convergence {
        /// Which iteration failed.
        context: &'static str,
        /// Iterations performed.
        iterations: usize,
        /// Final residual or update size.
        residual: f64,
        /// Residual (or update) history, oldest first.
        history: Vec<f64>,
    },
}

impl Error {
    /// Shorthand for [`Error::Validation`].
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation { field: field.into(), reason: reason.into() }
    }

    /// Shorthand for [`Error::Domain`].
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
