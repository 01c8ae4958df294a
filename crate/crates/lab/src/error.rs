use std::path::PathBuf;

use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid config field `{field}`: {reason}")]
    Validation { field: &'static str, reason: String },
    #[error("{operation} failed: {source}")]
    Numeric { operation: &'static str, source: hilfer_core::Error },
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("verification failed: {first} ({failed} of {total} checks)")]
    Verify { first: String, failed: usize, total: usize },
}

impl LabError {
    pub fn validation(field: &'static str, reason: String) -> Self {
        LabError::Validation { field, reason }
    }

    pub fn io(path: impl Into<PathBuf>, err: impl std::fmt::Display) -> Self {
        LabError::Io { path: path.into(), message: err.to_string() }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            LabError::Parse { .. } => "parse",
            LabError::Validation { .. } => "validation",
            LabError::Numeric { .. } => "numeric",
            LabError::Io { .. } => "io",
            LabError::Verify { .. } => "verify",
        }
    }

    /// Machine-readable form for the command line.
    pub fn to_json(&self) -> serde_json::Value {
        let mut body = json!({ "kind": self.kind(), "message": self.to_string() });
        match self {
            LabError::Parse { line, column, .. } => {
                body["line"] = json!(line);
                body["column"] = json!(column);
            }
            LabError::Validation { field, .. } => body["field"] = json!(field),
            LabError::Numeric { operation, .. } => body["operation"] = json!(operation),
            LabError::Io { path, .. } => body["path"] = json!(path),
            LabError::Verify { first, .. } => body["first_failure"] = json!(first),
        }
        json!({ "error": body })
    }
}

impl From<hilfer_core::Error> for LabError {
    fn from(source: hilfer_core::Error) -> Self {
        LabError::Numeric { operation: "core", source }
    }
}

/// Tags a core error with the operation that produced it.
pub trait Context<T> {
    fn during(self, operation: &'static str) -> Result<T, LabError>;
}

impl<T> Context<T> for hilfer_core::Result<T> {
    fn during(self, operation: &'static str) -> Result<T, LabError> {
        self.map_err(|source| LabError::Numeric { operation, source })
    }
}
