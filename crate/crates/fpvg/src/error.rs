use std::io;
use std::path::PathBuf;

use serde_json::{json, Value};

pub type Result<T, E = FpvgError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum FpvgError {
    /// Malformed or inconsistent input line.
    #[error("{file}:{line}: field `{field}`: {message}")]
    Validation {
        file: String,
        line: usize,
        field: String,
        message: String,
    },
    #[error(transparent)]
    Core(#[from] fpvg_core::Error),
    #[error("{message}")]
    Invalid { message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl FpvgError {
    pub fn validation(file: &str, line: usize, field: &str, message: impl Into<String>) -> Self {
        FpvgError::Validation {
            file: file.to_owned(),
            line,
            field: field.to_owned(),
            message: message.into(),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        FpvgError::Invalid { message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        FpvgError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 for validation failures, 2 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            FpvgError::Io { .. } => 2,
            _ => 1,
        }
    }

    /// Machine-readable diagnostic printed on standard error.
    pub fn diagnostic(&self) -> Value {
        match self {
            FpvgError::Validation {
                file,
                line,
                field,
                message,
            } => json!({
                "error": "validation",
                "file": file,
                "line": line,
                "field": field,
                "message": message,
            }),
            FpvgError::Core(fpvg_core::Error::MissingPrediction { run_label, question_id }) => json!({
                "error": "validation",
                "run_label": run_label,
                "question_id": question_id,
                "message": self.to_string(),
            }),
            FpvgError::Core(_) | FpvgError::Invalid { .. } => json!({
                "error": "validation",
                "message": self.to_string(),
            }),
            FpvgError::Io { path, source } => json!({
                "error": "io",
                "path": path.display().to_string(),
                "message": source.to_string(),
            }),
        }
    }
}
