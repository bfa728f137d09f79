use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

/// Exit status for a malformed or inconsistent configuration.
pub const EXIT_INVALID: i32 = 2;
/// Exit status when a resource guard refuses the request.
pub const EXIT_REFUSED: i32 = 3;
/// Exit status for I/O and internal failures.
pub const EXIT_FAILED: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid {field}: {message}")]
    Invalid { field: String, message: String },

    #[error("refused: {0}")]
    Refused(String),

    #[error("cannot {action} {}: {source}", path.display())]
    Io {
        action: &'static str,
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid { .. } => EXIT_INVALID,
            CliError::Refused(_) => EXIT_REFUSED,
            CliError::Io { .. } | CliError::Failed(_) => EXIT_FAILED,
        }
    }

    /// Prefixes the field path of a validation error with `scope`.
    pub fn within(self, scope: &str) -> Self {
        match self {
            CliError::Invalid { field, message } => CliError::Invalid {
                field: join(scope, &field),
                message,
            },
            other => other,
        }
    }

    pub fn report(&self) -> ErrorReport {
        let (kind, field) = match self {
            CliError::Invalid { field, .. } => ("validation", Some(field.clone())),
            CliError::Refused(_) => ("refused", None),
            CliError::Io { .. } => ("io", None),
            CliError::Failed(_) => ("failed", None),
        };
        ErrorReport {
            status: "error",
            exit_code: self.exit_code(),
            kind,
            field,
            message: self.to_string(),
        }
    }
}

fn join(scope: &str, field: &str) -> String {
    if scope.is_empty() {
        field.to_string()
    } else if field.is_empty() || field == "." {
        scope.to_string()
    } else if field.starts_with('[') {
        format!("{scope}{field}")
    } else {
        format!("{scope}.{field}")
    }
}

impl From<supbin::Error> for CliError {
    fn from(e: supbin::Error) -> Self {
        match e {
            supbin::Error::Validation { field, message } => CliError::Invalid { field, message },
            supbin::Error::Domain(message) => CliError::Invalid {
                field: String::new(),
                message,
            },
            supbin::Error::Refused(m) => CliError::Refused(m),
            other => CliError::Failed(other.to_string()),
        }
    }
}

/// Body of `error.json`.
#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub status: &'static str,
    pub exit_code: i32,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub message: String,
}

/// Converts a core error raised while handling `scope`.
pub(crate) fn at(scope: &str) -> impl Fn(supbin::Error) -> CliError + '_ {
    move |e| CliError::from(e).within(scope)
}
