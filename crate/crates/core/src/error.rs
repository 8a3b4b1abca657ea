use std::path::PathBuf;

use crate::graph::{ArcId, VertexId};
use crate::oracle::OracleResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("profile evaluated at negative time {0}")]
    NegativeTime(f64),

    #[error("vertex {0} does not exist")]
    InvalidVertex(VertexId),

    #[error("arc {0} does not exist")]
    InvalidArc(ArcId),

    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),

    #[error("parallel arc {tail} -> {head}")]
    ParallelArc { tail: VertexId, head: VertexId },

    #[error("arc {tail} -> {head} has non-positive travel time in window {window}")]
    NonPositiveTravelTime {
        tail: VertexId,
        head: VertexId,
        window: usize,
    },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("path is not connected: arc {arc} does not start at vertex {expected}")]
    DisconnectedPath { arc: ArcId, expected: VertexId },

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("query is infeasible within the given budget")]
    Infeasible,

    #[error("oracle node limit of {limit} exceeded")]
    NodeLimitExceeded {
        limit: u64,
        incumbent: Option<Box<OracleResult>>,
    },

    #[error("MIP model too large: {variables} variables exceed the cap of {cap}")]
    ModelTooLarge { variables: usize, cap: usize },

    #[error("LP parse error on line {line}: {message}")]
    LpParse { line: usize, message: String },

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("time bucket of {minutes} min could not be filled after {attempts} attempts")]
    BucketUnfillable { minutes: u32, attempts: usize },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
