use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid UTF-8 in {source_name} at byte offset {offset}")]
    Decode { source_name: String, offset: usize },

    #[error("line counts differ: {left_name} has {left} lines, {right_name} has {right}")]
    Alignment {
        left_name: String,
        left: usize,
        right_name: String,
        right: usize,
    },

    #[error("invalid token {0:?}: tokens must be non-empty and contain no whitespace")]
    InvalidToken(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("requested {k} lines but the corpus has only {size}")]
    Range { k: usize, size: usize },

    #[error("malformed codes file, line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("vocabulary index {index} out of range for vocabulary of size {size}")]
    Vocabulary { index: usize, size: usize },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("non-finite value: {0}")]
    Numeric(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable machine-readable error kind, used by the CLI's `code=... msg=...` line.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Decode { .. } => "decode",
            Error::Alignment { .. } => "alignment",
            Error::InvalidToken(_) => "token",
            Error::Config(_) => "config",
            Error::Range { .. } => "range",
            Error::Format { .. } => "format",
            Error::Vocabulary { .. } => "vocabulary",
            Error::Dimension { .. } => "dimension",
            Error::Numeric(_) => "numeric",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn dim(context: &'static str, expected: impl ToString, found: impl ToString) -> Self {
        Error::Dimension {
            context,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
