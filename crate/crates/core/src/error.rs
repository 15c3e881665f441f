use thiserror::Error;

/// Errors raised by model construction, evaluation and the numerical oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violates a documented precondition.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// The evaluation point lies where the requested quantity is undefined
    /// (underflowing density, overlapping packets, leaking grid, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure did not reach its requested accuracy.
    #[error("numerical failure in {routine}: {detail}")]
    Numerical { routine: &'static str, detail: String },

    /// A run configuration could not be parsed or resolved.
    #[error("configuration error: {0}")]
    Config(String),

    /// An internal invariant was broken.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn numerical(routine: &'static str, detail: impl Into<String>) -> Self {
        Error::Numerical {
            routine,
            detail: detail.into(),
        }
    }
}
