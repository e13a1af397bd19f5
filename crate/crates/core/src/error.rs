//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = LensError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LensError {
    #[error("XML syntax error at byte {offset}: {message}")]
    XmlSyntax { offset: u64, message: String },

    #[error("unresolvable XML entity `&{name};` at byte {offset}")]
    UnresolvedEntity { name: String, offset: u64 },

    #[error("empty author name")]
    EmptyAuthorName,

    #[error("area config {path}: {message}")]
    AreaConfig { path: PathBuf, message: String },

    #[error("venue `{venue}` listed in both area `{first}` and area `{second}`")]
    DuplicateVenue {
        venue: String,
        first: String,
        second: String,
    },

    #[error("record file {path}: {message}")]
    RecordFile { path: PathBuf, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    IoContext {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl LensError {
    pub fn io_context(context: impl Into<String>, source: std::io::Error) -> Self {
        LensError::IoContext {
            context: context.into(),
            source,
        }
    }
}
