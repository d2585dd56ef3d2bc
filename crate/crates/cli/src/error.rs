use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] saext_core::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("sweep too large: {0}")]
    SweepSize(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
            CliError::Csv(_) => "csv",
            CliError::Json(_) => "json",
            CliError::SweepSize(_) => "sweep_size",
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Core(e) => e.message(),
            CliError::Usage(m) | CliError::SweepSize(m) => m.clone(),
            other => other.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::SweepSize(_) => 2,
            _ => 1,
        }
    }

    /// `{code, message, context}`
    pub fn to_json(&self, context: Value) -> Value {
        json!({ "code": self.code(), "message": self.message(), "context": context })
    }
}
