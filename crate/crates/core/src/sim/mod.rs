//! Ground-truth instances, random distance reveals and degeneracy analysis.

mod analysis;
mod instance;
mod reveal;

use thiserror::Error;

pub use analysis::{
    default_mu, dependent_families, dependent_family_count, find_dense_subspace, DenseSubspace,
    ENUMERATION_LIMIT,
};
pub use instance::{generate, GeneratorKind, InstanceSpec};
pub use reveal::{reveal, RevealPlan};

use crate::geometry::GeometryError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid instance: {0}")]
    InvalidSpec(String),
    #[error("enumeration of {count} subsets exceeds the limit of {limit}")]
    TooLarge { count: u128, limit: u128 },
    #[error("no general-position sample after {attempts} attempts")]
    GeneralPositionFailed { attempts: u64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("mu must lie in (0, 1), got {0}")]
    InvalidMu(f64),
}
