use thiserror::Error;

/// Failures raised by the numeric and cone operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or non-finite input.
    #[error("input error: {0}")]
    Input(String),

    /// An iterative routine did not converge.
    #[error("numeric error: {message} (after {iterations} iterations)")]
    Numeric { message: String, iterations: usize },

    /// The input is well-formed but outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
