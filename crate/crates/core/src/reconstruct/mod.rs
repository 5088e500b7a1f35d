//! Coordinate-free reconstruction from partially revealed squared distances.
//!
//! Nothing here sees coordinates: independence and inference are decided from
//! known distances alone.

mod clique;
mod closure;
mod io;
mod merge;
mod pipeline;
mod projection;
mod reduction;
mod state;

use thiserror::Error;

pub use clique::extract_reconstructible_clique;
pub use closure::{geometric_closure, ClosureLog, ClosureRecord};
pub use io::RevealFile;
pub use merge::{merge_duplicates, share_component_distances};
pub use pipeline::{run_pipeline, InferredDistance, LevelSummary, PipelineOptions, PipelineResult};
pub use projection::{recover_projection, AnchorEmbedding, Projection};
pub use reduction::{reduce_dimension, ProjectionMap, ReductionStep};
pub use state::{DistanceState, Provenance};

use crate::geometry::GeometryError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReconstructError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("known distances around ({u}, {v}) with base {base:?} fit no embedding (residual {residual})")]
    InconsistencyDetected {
        u: usize,
        v: usize,
        base: Vec<usize>,
        residual: f64,
    },
    #[error("points {a} and {b} are merged but disagree on their distance to {third}")]
    ZeroConflict { a: usize, b: usize, third: usize },
    #[error("reduced squared distance {value} for ({i}, {j}) is negative")]
    NegativeResidual { i: usize, j: usize, value: f64 },
    #[error("no projection recorded for point {index}")]
    MissingProjection { index: usize },
    #[error("projection system for point {v} is singular")]
    SingularProjection { v: usize },
    #[error("anchor has {indices} indices but {points} points")]
    AnchorSize { indices: usize, points: usize },
    #[error("closure log record {index} does not replay")]
    ReplayMismatch { index: usize },
    #[error("pair ({i}, {j}) is invalid for {n} points")]
    InvalidPair { i: usize, j: usize, n: usize },
    #[error("invalid squared distance {value} for ({i}, {j})")]
    InvalidDistance { i: usize, j: usize, value: f64 },
    #[error("reveal round has {got} points, expected {expected}")]
    RoundSize { expected: usize, got: usize },
    #[error("delta must lie in (0, 1), got {0}")]
    InvalidDelta(f64),
    #[error("malformed input: {0}")]
    Format(String),
}
