use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{DistanceState, ReconstructError};
use crate::geometry::{
    matrix_is_positive_definite, project_onto_span, squared_distance, PointConfig, Tolerance,
};

/// An embedded anchor clique: state indices and their coordinates in `R^{d'}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnchorEmbedding {
    pub indices: Vec<usize>,
    pub points: PointConfig,
}

impl AnchorEmbedding {
    pub fn new(indices: Vec<usize>, points: PointConfig) -> Result<Self, ReconstructError> {
        if indices.len() != points.len() {
            return Err(ReconstructError::AnchorSize {
                indices: indices.len(),
                points: points.len(),
            });
        }
        Ok(Self { indices, points })
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn position(&self, index: usize) -> Option<usize> {
        self.indices.iter().position(|&i| i == index)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Projection {
    /// Orthogonal projection onto the anchor span, squared distance to the
    /// span, and the anchor positions it was solved from.
    Covered {
        point: Vec<f64>,
        residual: f64,
        basis: Vec<usize>,
    },
    NotCovered,
}

/// Locates the projection of point `v` onto the affine span of the anchor,
/// using only its known distances to anchor points.
///
/// A basis of `d' + 1` independent anchor points with known distance to `v`
/// is grown greedily, each time taking the candidate farthest from the span
/// so far; with fewer than `d' + 1` such points `v` is not covered.
pub fn recover_projection(
    anchor: &AnchorEmbedding,
    s: &DistanceState,
    v: usize,
    tol: &Tolerance,
) -> Result<Projection, ReconstructError> {
    let dim = anchor.dim();
    let candidates: Vec<usize> = (0..anchor.indices.len())
        .filter(|&k| s.is_known(v, anchor.indices[k]))
        .collect();
    let Some(&first) = candidates.first() else {
        return Ok(Projection::NotCovered);
    };
    let coords = |k: usize| anchor.points.point(k).to_vec();
    let mut basis = vec![first];
    while basis.len() < dim + 1 {
        let span: Vec<Vec<f64>> = basis.iter().map(|&k| coords(k)).collect();
        let mut best: Option<(f64, usize)> = None;
        for &k in &candidates {
            if basis.contains(&k) {
                continue;
            }
            let (_, r) = project_onto_span(anchor.points.point(k), &span, tol)?;
            if best.is_none_or(|(b, _)| r > b) {
                best = Some((r, k));
            }
        }
        let Some((_, k)) = best else {
            return Ok(Projection::NotCovered);
        };
        let a0 = anchor.points.point(basis[0]);
        let dirs: Vec<Vec<f64>> = basis[1..]
            .iter()
            .chain(std::iter::once(&k))
            .map(|&j| {
                anchor
                    .points
                    .point(j)
                    .iter()
                    .zip(a0)
                    .map(|(x, y)| x - y)
                    .collect()
            })
            .collect();
        let m = dirs.len();
        let gram = DMatrix::from_fn(m, m, |i, j| {
            dirs[i].iter().zip(&dirs[j]).map(|(x, y)| x * y).sum()
        });
        if !matrix_is_positive_definite(&gram, tol) {
            return Ok(Projection::NotCovered);
        }
        basis.push(k);
    }

    // |y - a_i|^2 + h^2 = D_i; subtracting i = 0 leaves a linear system in y
    let a0 = anchor.points.point(basis[0]);
    let d0 = s.value(v, anchor.indices[basis[0]]);
    let norm0: f64 = a0.iter().map(|x| x * x).sum();
    let point = if dim == 0 {
        Vec::new()
    } else {
        let lhs = DMatrix::from_fn(dim, dim, |i, j| {
            2.0 * (anchor.points.point(basis[i + 1])[j] - a0[j])
        });
        let rhs = DVector::from_fn(dim, |i, _| {
            let ai = anchor.points.point(basis[i + 1]);
            let di = s.value(v, anchor.indices[basis[i + 1]]);
            ai.iter().map(|x| x * x).sum::<f64>() - norm0 - (di - d0)
        });
        let y = lhs
            .lu()
            .solve(&rhs)
            .ok_or(ReconstructError::SingularProjection { v })?;
        y.iter().copied().collect()
    };
    let h2 = d0 - squared_distance(&point, a0);
    let scale = basis
        .iter()
        .map(|&k| s.value(v, anchor.indices[k]))
        .fold(anchor_scale(anchor), f64::max);
    let floor = tol.residual_floor(scale);
    if h2 < -floor {
        return Err(ReconstructError::InconsistencyDetected {
            u: v,
            v,
            base: basis.iter().map(|&k| anchor.indices[k]).collect(),
            residual: h2,
        });
    }
    Ok(Projection::Covered {
        point,
        residual: h2.max(0.0),
        basis,
    })
}

fn anchor_scale(anchor: &AnchorEmbedding) -> f64 {
    let p = &anchor.points;
    if p.is_empty() {
        return 0.0;
    }
    (0..p.len())
        .map(|k| p.squared_distance(0, k))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reconstruct::Provenance;

    fn line_anchor(xs: &[f64]) -> AnchorEmbedding {
        let points = PointConfig::new(1, xs.iter().map(|&x| vec![x]).collect()).unwrap();
        AnchorEmbedding::new((0..xs.len()).collect(), points).unwrap()
    }

    #[test]
    fn point_above_a_line() {
        let anchor = line_anchor(&[0.0, 3.0]);
        let mut s = DistanceState::new(3);
        s.set(0, 1, 9.0, Provenance::Revealed);
        s.set(2, 0, 25.0, Provenance::Revealed);
        s.set(2, 1, 16.0, Provenance::Revealed);
        match recover_projection(&anchor, &s, 2, &Tolerance::default()).unwrap() {
            Projection::Covered {
                point, residual, ..
            } => {
                assert!((point[0] - 3.0).abs() < 1e-12);
                assert!((residual - 16.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn coincident_point_projects_onto_itself() {
        let anchor = line_anchor(&[0.0, 2.0, 5.0]);
        let mut s = DistanceState::new(4);
        s.set(3, 1, 0.0, Provenance::Revealed);
        s.set(3, 2, 9.0, Provenance::Revealed);
        match recover_projection(&anchor, &s, 3, &Tolerance::default()).unwrap() {
            Projection::Covered {
                point, residual, ..
            } => {
                assert!((point[0] - 2.0).abs() < 1e-12);
                assert!(residual.abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dependent_neighbours_do_not_cover() {
        // v knows distances only to anchor points 0, 1 and 3, which span a line
        let points = PointConfig::new(
            2,
            vec![
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, 0.0],
            ],
        )
        .unwrap();
        let anchor = AnchorEmbedding::new(vec![0, 1, 2, 3], points).unwrap();
        let mut s = DistanceState::new(5);
        s.set(4, 0, 2.0, Provenance::Revealed);
        s.set(4, 3, 2.0, Provenance::Revealed);
        s.set(4, 1, 1.0, Provenance::Revealed);
        assert_eq!(
            recover_projection(&anchor, &s, 4, &Tolerance::default()).unwrap(),
            Projection::NotCovered
        );
        s.set(4, 2, 1.0, Provenance::Revealed);
        assert!(matches!(
            recover_projection(&anchor, &s, 4, &Tolerance::default()).unwrap(),
            Projection::Covered { .. }
        ));
    }

    #[test]
    fn no_known_distances_do_not_cover() {
        let anchor = line_anchor(&[0.0, 1.0]);
        let s = DistanceState::new(3);
        assert_eq!(
            recover_projection(&anchor, &s, 2, &Tolerance::default()).unwrap(),
            Projection::NotCovered
        );
    }
}
