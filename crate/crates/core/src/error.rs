use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed topology: {0}")]
    Parse(String),
    #[error("invalid topology: {0}")]
    Validation(String),
    #[error("no path from {source_node} to {destination}")]
    NoPath {
        source_node: String,
        destination: String,
    },
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("unknown link {0}")]
    UnknownLink(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("{0}")]
    Domain(String),
    #[error(
        "no model with up to {max_hops} stages reaches {target} below the threshold \
         (closest: {achieved} with {hops} stages)"
    )]
    Infeasible {
        target: f64,
        achieved: f64,
        hops: usize,
        max_hops: usize,
    },
    #[error("length mismatch: {left} verdicts vs {right} truths")]
    LengthMismatch { left: usize, right: usize },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}
