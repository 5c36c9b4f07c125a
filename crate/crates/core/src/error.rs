use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("project directory {path} is not readable: {source}")]
    ProjectDir {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path} is not a directory")]
    NotADirectory { path: PathBuf },

    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid ops data: {0}")]
    OpsFormat(String),

    #[error("invalid ops record #{index}: {message}")]
    OpsRecord { index: usize, message: String },

    #[error("invalid config {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("invalid module path {0:?}")]
    ModulePath(String),

    #[error("partition does not match graph: {0}")]
    Partition(String),

    #[error("requested {requested} services but the graph has only {nodes} nodes")]
    TooManyServices { requested: usize, nodes: usize },

    #[error("{0}")]
    Usage(String),
}
