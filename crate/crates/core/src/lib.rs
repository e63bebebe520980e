//! Dynamic random walk with restart.
//!
//! Maintains personalized PageRank (random walk with restart) score vectors
//! for a single seed node while a graph receives streamed edge and node
//! insertions and deletions. A cold start uses cumulative power iteration;
//! each update batch is absorbed by propagating only the score offset that
//! the modified rows induce, which is exact at tight tolerance and bounded
//! by `ε / c` at loose tolerance.

pub mod bench;
pub mod cli;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod propagation;
pub mod scores;
pub mod stream;
pub mod tracker;

pub use error::{Error, Result};
pub use graph::{DynamicGraph, NodeId, RowChange, RowChangeSet, UpdateOp};
pub use propagation::{
    Config, DeadEndMode, Execution, PropagationStats, ScoreVector, SignedScoreVector,
};
pub use tracker::RwrTracker;
