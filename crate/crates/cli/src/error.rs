use lca_core::LcaError;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
/// A verification check failed.
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
/// COMPONENT_TOO_LARGE or PHASE1_ERROR in at least one repetition.
pub const EXIT_ALGORITHM: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },
    #[error("{0}")]
    Algorithm(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn validation(field: &str, reason: impl Into<String>) -> Self {
        CliError::Validation {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } | CliError::Io(_) => EXIT_VALIDATION,
            CliError::Algorithm(_) => EXIT_ALGORITHM,
        }
    }
}

impl From<LcaError> for CliError {
    fn from(e: LcaError) -> Self {
        match e {
            LcaError::InvalidParameter { field, reason } => CliError::validation(field, reason),
            other => CliError::Algorithm(other.to_string()),
        }
    }
}

impl From<lca_core::OracleError> for CliError {
    fn from(e: lca_core::OracleError) -> Self {
        CliError::Algorithm(e.to_string())
    }
}

/// Errors an LCA reports as part of its contract rather than as a bug.
pub fn is_reported(e: &LcaError) -> bool {
    matches!(e, LcaError::ComponentTooLarge { .. } | LcaError::Phase1Failed { .. })
}
