use std::path::PathBuf;

use handover_core::ModelError;

/// Everything that can stop a command.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },
    #[error("{0}")]
    Model(ModelError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed artifact: {reason}")]
    Artifact { path: PathBuf, reason: String },
    #[error("verification failed: {0}")]
    Verification(String),
}

impl HarnessError {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        HarnessError::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 for configuration problems, 3 for failed
    /// verification, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config { .. } | HarnessError::Model(_) => 2,
            HarnessError::Verification(_) => 3,
            HarnessError::Io { .. } | HarnessError::Artifact { .. } => 1,
        }
    }
}

impl From<ModelError> for HarnessError {
    /// Qualifies core field names with their config section.
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::InvalidAnthropometry { field, reason } => {
                HarnessError::config(format!("anthro.{field}"), reason)
            }
            ModelError::InvalidAdjustment { field, value } => {
                HarnessError::config(format!("task.{field}"), format!("{value} is outside 0..=3"))
            }
            ModelError::InvalidConfig { field, reason } => HarnessError::config(field, reason),
            other => HarnessError::Model(other),
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
