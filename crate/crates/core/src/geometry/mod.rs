//! Euclidean distance geometry on squared distances.
//!
//! All distances in this crate are squared; square roots appear only where
//! coordinates are produced. Repeated points are legal inputs everywhere.

mod embed;
pub(crate) mod exact;
mod gram;
mod points;
mod recover;
mod tolerance;

use thiserror::Error;

pub use embed::{embed_from_distances, embed_with_spectrum, Embedding};
pub(crate) use gram::matrix_is_positive_definite;
pub use gram::{gram_from_distances, is_independent, is_positive_definite, GramMatrix};
pub use points::{squared_distance, PointConfig, SquaredDistanceMatrix};
pub(crate) use recover::BaseFrame;
pub use recover::{affine_dimension, project_onto_span, recover_missing_distance, MissingDistance};
pub use tolerance::Tolerance;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("distance matrix is incomplete: entry ({0}, {1}) is unknown")]
    Incomplete(usize, usize),
    #[error("invalid squared distance {value} at ({i}, {j})")]
    NegativeDistance { i: usize, j: usize, value: f64 },
    #[error("diagonal entry {i} must be 0, found {value}")]
    NonZeroDiagonal { i: usize, value: f64 },
    #[error("distance matrix is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("anchor {anchor} is out of range for {n} points")]
    AnchorOutOfRange { anchor: usize, n: usize },
    #[error("expected {expected} points, got {got}")]
    WrongCardinality { expected: usize, got: usize },
    #[error("expected exactly one unknown pair, found {0}")]
    MissingPairCount(usize),
    #[error("expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("distances are not Euclidean: Gram eigenvalue {eigenvalue}")]
    NonEuclidean { eigenvalue: f64 },
    #[error("affine dimension {rank} exceeds target dimension {target}")]
    RankTooHigh { rank: usize, target: usize },
    #[error("known distances admit no embedding in dimension {dim} (residual {residual})")]
    InconsistentDistances { dim: usize, residual: f64 },
    #[error("basis points are affinely dependent")]
    DegenerateBasis,
    #[error("empty input")]
    EmptyInput,
    #[error("relative tolerance must lie in (0, 1), got {0}")]
    InvalidTolerance(f64),
}
