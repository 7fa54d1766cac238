//! Error types shared across the pipeline.

use std::path::PathBuf;

use thiserror::Error;

/// A persisted file does not match its documented layout.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("{what}: line {line}, column {column}: {message}")]
pub struct SchemaError {
    pub what: String,
    /// 1-based, counting the header as line 1.
    pub line: usize,
    /// 1-based field index.
    pub column: usize,
    pub message: String,
}

impl SchemaError {
    pub fn at(what: &str, line: usize, column: usize, message: impl Into<String>) -> Self {
        SchemaError {
            what: what.to_string(),
            line,
            column,
            message: message.into(),
        }
    }

    pub fn csv(what: &str, e: csv::Error) -> Self {
        let (line, column) = match e.position() {
            Some(p) => (p.line() as usize, 1),
            None => (0, 0),
        };
        SchemaError::at(what, line, column, e.to_string())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: crate::frontend::ParseError,
    },
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error("corpus lint failed:\n{0}")]
    Lint(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("stage {stage}: {message}")]
    Stage { stage: &'static str, message: String },
    #[error(transparent)]
    Model(#[from] crate::gbdt::ModelError),
    #[error(transparent)]
    Mutation(#[from] crate::mutation::MutationError),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn stage(stage: &'static str, message: impl ToString) -> Self {
        Error::Stage {
            stage,
            message: message.to_string(),
        }
    }

    /// Process exit code: 1 usage, 2 corpus or lint, 3 stage failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Config(_) => 1,
            Error::Lint(_) | Error::Parse { .. } => 2,
            _ => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
