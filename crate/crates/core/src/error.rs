use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("schema violation at `{path}`: {message}")]
    SchemaViolation { path: String, message: String },

    #[error("invalid glob pattern `{pattern}`: {message}")]
    InvalidGlob { pattern: String, message: String },

    #[error("dataset path is missing or not a directory: {}", .0.display())]
    DatasetPathMissing(PathBuf),

    #[error("unknown parser `{key}` (available: {available})")]
    UnknownParser { key: String, available: String },

    #[error("scan artifact {} not found; run the scan stage first", .0.display())]
    MissingScanArtifact(PathBuf),

    #[error("parse artifact {} not found; run the parse stage first", .0.display())]
    MissingParseArtifact(PathBuf),

    #[error("measure artifact {} not found; run the measure stage first", .0.display())]
    MissingMeasureArtifact(PathBuf),

    #[error("no construct catalog available: {0}")]
    MissingCatalog(String),

    #[error("invalid construct catalog: {0}")]
    InvalidCatalog(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("cannot decode {} at line {line}, column {column}: {message}", path.display())]
    Decode {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("cannot encode artifact: {0}")]
    Encode(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
