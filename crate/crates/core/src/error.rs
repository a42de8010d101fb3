use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A row of an edge list could not be turned into an edge. `row` is the
    /// 1-based data row (the header is row 0).
    #[error("row {row}: {message}")]
    Ingest { row: usize, message: String },

    #[error("{}: expected header `Source,Target,weight`, found `{found}`", path.display())]
    Header { path: PathBuf, found: String },

    #[error("node id {id} out of range for a graph with {node_count} nodes")]
    InvalidNode { id: usize, node_count: usize },

    #[error("{0}")]
    Domain(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
