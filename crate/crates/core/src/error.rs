use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure category, used by the binary to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config error: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("row {row}: {message}")]
    Row { row: usize, message: String },

    #[error("duplicate date {0}")]
    DuplicateDate(String),

    #[error("missing values present in column `{0}`; run interpolation first")]
    MissingValues(String),

    #[error("column `{column}`: {message}")]
    Interpolation { column: String, message: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("singular system in {context} (condition estimate {condition:.3e})")]
    Singular { context: String, condition: f64 },

    #[error("{0}")]
    Numerical(String),

    #[error("{stage} failure: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) => ErrorKind::Usage,
            Error::Io { .. }
            | Error::Csv(_)
            | Error::Json(_)
            | Error::Row { .. }
            | Error::DuplicateDate(_)
            | Error::MissingValues(_)
            | Error::Interpolation { .. } => ErrorKind::Data,
            Error::Degenerate(_) | Error::Singular { .. } | Error::Numerical(_) => {
                ErrorKind::Numerical
            }
            Error::Stage { source, .. } => source.kind(),
        }
    }

    /// Pipeline stage that raised the error, if any.
    pub fn stage(&self) -> Option<&'static str> {
        match self {
            Error::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
