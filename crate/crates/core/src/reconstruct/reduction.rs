use std::collections::BTreeMap;

use serde::Serialize;

use super::{DistanceState, Provenance, ReconstructError};
use crate::geometry::{squared_distance, Tolerance};

/// One dimension-reduction step of the pipeline, in original point indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionStep {
    pub level: usize,
    /// Points kept for the next level, sorted.
    pub surviving: Vec<usize>,
    /// Dimension of the subspace spanned by the anchor clique.
    pub subspace_dim: usize,
    pub anchor: Vec<usize>,
    pub anchor_coords: Vec<Vec<f64>>,
    /// Squared distances between projections, `(i, j, b)` with `i < j`.
    pub constants: Vec<(usize, usize, f64)>,
}

/// Projection coordinates and squared distance to the subspace, by state index.
pub type ProjectionMap = BTreeMap<usize, (Vec<f64>, f64)>;

/// Subtracts `b_ij = |y_i - y_j|^2` from every known pair inside `surviving`.
///
/// Returns the constants in state indices `(a, b, b_ab)` over `surviving`
/// and the reduced state renumbered in the order of `surviving`. Values
/// within the tolerance below zero snap to 0, as do values below the
/// eigenvalue floor, so points collapsed onto one location coincide exactly.
pub fn reduce_dimension(
    s: &DistanceState,
    proj: &ProjectionMap,
    surviving: &[usize],
    tol: &Tolerance,
) -> Result<(Vec<(usize, usize, f64)>, DistanceState), ReconstructError> {
    let coords: Vec<&Vec<f64>> = surviving
        .iter()
        .map(|i| {
            proj.get(i)
                .map(|(y, _)| y)
                .ok_or(ReconstructError::MissingProjection { index: *i })
        })
        .collect::<Result<_, _>>()?;
    let floor = tol.residual_floor(s.scale());
    let zero = tol.eigen_floor(s.scale());
    let mut constants = Vec::with_capacity(surviving.len() * surviving.len().saturating_sub(1) / 2);
    let mut reduced = DistanceState::new(surviving.len());
    for (a, &i) in surviving.iter().enumerate() {
        for (b, &j) in surviving.iter().enumerate().skip(a + 1) {
            let bij = squared_distance(coords[a], coords[b]);
            constants.push((i, j, bij));
            if let Some(d2) = s.get(i, j) {
                let r = d2 - bij;
                if r < -floor {
                    return Err(ReconstructError::NegativeResidual { i, j, value: r });
                }
                let r = if r <= zero { 0.0 } else { r };
                reduced.set(a, b, r, Provenance::Reduced);
            }
        }
    }
    Ok((constants, reduced))
}
