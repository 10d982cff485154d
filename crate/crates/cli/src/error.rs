use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Computation(String),
    #[error("{0}")]
    Verification(String),
}

#[derive(Serialize)]
pub struct ErrorRecord<'a> {
    pub error: &'a str,
    pub exit_code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(e: impl std::fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }

    /// Wrap a module error with what was being computed.
    pub fn computation(context: &str, e: impl std::fmt::Display) -> Self {
        CliError::Computation(format!("{context}: {e}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Computation(_) => 3,
            CliError::Verification(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Computation(_) => "computation",
            CliError::Verification(_) => "verification",
        }
    }

    pub fn record(&self) -> ErrorRecord<'_> {
        ErrorRecord {
            error: self.kind(),
            exit_code: self.exit_code(),
            message: self.to_string(),
        }
    }
}
