use std::path::PathBuf;

use pld_core::error::{ConfigError, DataError, InferenceError, LearnError};
use pld_core::oracle::OracleTooLarge;
use thiserror::Error;

pub type Result<T, E = PldError> = std::result::Result<T, E>;

/// Process exit codes, stable across releases.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    /// I/O failures and malformed data files.
    pub const FAILURE: i32 = 1;
    /// Bad command-line usage (reported by the argument parser).
    pub const USAGE: i32 = 2;
    pub const VALIDATION: i32 = 3;
    pub const SCHEMA: i32 = 4;
    /// The node cap stopped learning; a PARTIAL model was written.
    pub const PARTIAL: i32 = 5;
    pub const PARSE: i32 = 6;
}

#[derive(Debug, Error)]
pub enum PldError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("line {line}, column `{column}`: cannot read {cell:?} as {kind}")]
    CellType {
        line: u64,
        column: String,
        cell: String,
        kind: &'static str,
    },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Validation(String),
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Oracle(#[from] OracleTooLarge),
    #[error(transparent)]
    Inference(#[from] InferenceError),
}

impl PldError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        PldError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            PldError::Config(_)
            | PldError::Validation(_)
            | PldError::Learn(LearnError::Config(_))
            | PldError::Learn(LearnError::NoTargets)
            | PldError::Learn(LearnError::UnknownTarget(_)) => exit::VALIDATION,
            PldError::Schema(_) => exit::SCHEMA,
            PldError::Learn(LearnError::NodeCap { .. }) => exit::PARTIAL,
            PldError::Parse { .. } => exit::PARSE,
            _ => exit::FAILURE,
        }
    }
}
