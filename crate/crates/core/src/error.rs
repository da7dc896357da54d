//! Crate-wide error type shared by the maze model and the engines.

use crate::maze::Coord;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("malformed maze input: {0}")]
    MalformedInput(String),

    #[error("invalid maze dimensions: {0}")]
    InvalidDimensions(String),

    #[error("cell {0} is a wall")]
    WallQuery(Coord),

    #[error("no channel route between the requested endpoints")]
    Unreachable,

    #[error("endpoints must be distinct channel cells with distinct boundary values")]
    InvalidEndpoints,

    #[error("trace stuck at {0}: no strictly improving neighbor")]
    LocalExtremum(Coord),

    #[error("step budget of {0} exceeded before reaching the goal")]
    StepBudgetExceeded(usize),

    #[error("pointer chain does not terminate at the root (cycle)")]
    CycleDetected,

    #[error("maze has {cells} cells, above the exhaustive-search cap of {cap}")]
    TooLarge { cells: usize, cap: usize },

    #[error("thresholded cell set does not connect source to destination")]
    DisconnectedHotSet,

    #[error("more than one route survives thresholding; no unique path")]
    AmbiguousPath,

    #[error("path cell {0} is outside the maze channels")]
    PathOutsideMaze(Coord),

    #[error("field value range is degenerate; use a fixed normalization")]
    DegenerateRange,

    #[error("cellular automaton still active after {0} steps")]
    NotQuiescent(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
