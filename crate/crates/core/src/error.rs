use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument falls outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data failed validation; `field` names the offending item.
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },

    /// The request is well formed but exceeds a resource guard.
    #[error("refused: {0}")]
    Refused(String),

    /// A rewrite system did not reach a fixpoint.
    #[error("rewrite did not terminate (identities {first} and {second})")]
    RewriteCycle { first: String, second: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
