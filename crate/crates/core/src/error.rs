use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rule base of {requested} rules exceeds the cap of {cap}")]
    ResourceLimit { requested: String, cap: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("file not found: {}", path.display())]
    MissingFile { path: PathBuf },

    #[error("{}: row {row} has {found} columns, expected {expected}", path.display())]
    RaggedRow {
        path: PathBuf,
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("{}: row {row}, column {column} ({name}): cannot parse {value:?} as a number", path.display())]
    NonNumeric {
        path: PathBuf,
        row: usize,
        column: usize,
        name: String,
        value: String,
    },

    #[error("{}: {reason}", path.display())]
    Malformed { path: PathBuf, reason: String },

    #[error("dataset has a single class ({0}); at least two are required")]
    SingleClass(String),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the contents of an input file.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::RaggedRow { .. }
                | Error::NonNumeric { .. }
                | Error::Malformed { .. }
                | Error::SingleClass(_)
                | Error::Json(_)
        )
    }
}
