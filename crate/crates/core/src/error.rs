//! Error types.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("dimension must be at least 2, got {0}")]
    Dimension(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("coordinate overflow")]
    Overflow,
    #[error("axis {axis} out of range for dimension {dim}")]
    Axis { axis: u8, dim: usize },
    #[error("edge sign must be +1 or -1, got {0}")]
    Sign(i8),
    #[error("edge {at} does not start where the previous edge ends")]
    Disconnected { at: usize },
    #[error("path is not closed")]
    NotClosed,
    #[error("cycle has a backtrack")]
    Backtracking,
    #[error("not a unit square")]
    NotAPlaquette,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("empty sequence")]
    EmptySequence,
    #[error("component {0} is null after backtrack erasure")]
    NullComponent(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OpError {
    #[error("operation on the null sequence")]
    NullSequence,
    #[error("no component {0}")]
    NoComponent(usize),
    #[error("location {x} out of range for a loop of length {len}")]
    Location { x: usize, len: usize },
    #[error("merger needs two distinct components")]
    SameLoop,
    #[error("not admissible: {0}")]
    NotAdmissible(&'static str),
    #[error("replayed state does not match the recorded state at step {0}")]
    Replay(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerateError {
    #[error("enumeration budget of {0} trajectories exceeded")]
    Budget(u64),
    #[error("weight denominator overflowed 128 bits")]
    Overflow,
    #[error(transparent)]
    Op(#[from] OpError),
}
