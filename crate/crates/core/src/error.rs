use thiserror::Error;

/// Errors raised by the special functions, simulators and density evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the domain on which the routine is defined or supported.
    #[error("domain error in {routine}: {reason}")]
    Domain {
        routine: &'static str,
        reason: String,
    },
    /// Quadrature or series did not reach the requested tolerance.
    #[error("no convergence in {routine}: {reason}")]
    Convergence {
        routine: &'static str,
        reason: String,
    },
    /// Model or run parameters violate a type invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// Conditional kernel requested where the conditioning density is negligible.
    #[error("out of support: {0}")]
    OutOfSupport(String),
}

impl Error {
    pub(crate) fn domain(routine: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            routine,
            reason: reason.into(),
        }
    }

    pub(crate) fn convergence(routine: &'static str, reason: impl Into<String>) -> Self {
        Error::Convergence {
            routine,
            reason: reason.into(),
        }
    }

    pub(crate) fn invalid(reason: impl Into<String>) -> Self {
        Error::InvalidParameter(reason.into())
    }

    /// Short machine-readable tag, used by the CLI for its one-line error reason.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::Convergence { .. } => "convergence",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::OutOfSupport(_) => "out-of-support",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
