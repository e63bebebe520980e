use thiserror::Error;

use crate::graph::NodeId;
use crate::propagation::PropagationStats;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("node {0} does not exist")]
    InvalidNode(NodeId),

    #[error("edge {0} -> {1} already exists")]
    EdgeExists(NodeId, NodeId),

    #[error("edge {0} -> {1} does not exist")]
    EdgeMissing(NodeId, NodeId),

    #[error("seed node {0} cannot be deleted while it is tracked")]
    SeedDeleted(NodeId),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("propagation did not reach tolerance within {} iterations", .0.iterations)]
    NotConverged(PropagationStats),

    #[error("merged score at node {node} is negative ({value:e})")]
    NegativeScore { node: usize, value: f64 },

    #[error("score vector has zero mass")]
    ZeroMass,

    #[error("exact solve limited to {limit} nodes, graph has {nodes}")]
    OracleTooLarge { nodes: usize, limit: usize },

    #[error("rank correlation undefined: {0}")]
    UndefinedCorrelation(&'static str),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("stream too short: {0}")]
    StreamTooShort(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
