use nalgebra::{DMatrix, DVector};

use super::gram::{conditioning, matrix_is_positive_definite};
use super::{exact, GeometryError, PointConfig, SquaredDistanceMatrix, Tolerance};

/// Outcome of inferring the one unknown distance among `d + 3` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MissingDistance {
    /// The base is `d`-independent; the squared distance is unique.
    Determined(f64),
    /// The base lies in a `(d-1)`-dimensional subspace; two reflections fit.
    Dependent,
}

/// A `d`-independent base of `d + 1` points, embedded in `R^d` from its
/// distances alone: point 0 at the origin, point `i` at row `i` of the
/// Cholesky factor of the anchored Gram matrix.
#[derive(Debug, Clone)]
pub(crate) struct BaseFrame {
    dim: usize,
    chol: Vec<f64>,
    anchor_sq: Vec<f64>,
    min_eigenvalue: f64,
    scale: f64,
}

impl BaseFrame {
    /// `dist(i, j)` is the squared distance between base points `i, j < m`.
    /// Returns `None` when the base is dependent under `tol`.
    pub(crate) fn new(
        m: usize,
        dist: impl Fn(usize, usize) -> f64,
        tol: &Tolerance,
    ) -> Option<BaseFrame> {
        assert!(m >= 1, "a base needs at least one point");
        let d = m - 1;
        let mut scale = 0.0_f64;
        let gram = DMatrix::from_fn(d, d, |i, j| {
            let (a, b) = (dist(i + 1, 0), dist(j + 1, 0));
            scale = scale.max(a).max(b);
            if i == j {
                a
            } else {
                0.5 * (a + b - dist(i + 1, j + 1))
            }
        });
        if !matrix_is_positive_definite(&gram, tol) {
            return None;
        }
        let min_eigenvalue = conditioning(&gram) * gram.trace();
        let mut chol = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..=i {
                let mut s = gram[(i, j)];
                for k in 0..j {
                    s -= chol[i * d + k] * chol[j * d + k];
                }
                if i == j {
                    if s <= 0.0 {
                        return None;
                    }
                    chol[i * d + i] = s.sqrt();
                } else {
                    chol[i * d + j] = s / chol[j * d + j];
                }
            }
        }
        let anchor_sq = (0..d).map(|i| gram[(i, i)]).collect();
        Some(BaseFrame {
            dim: d,
            chol,
            anchor_sq,
            min_eigenvalue,
            scale,
        })
    }

    /// Growth of absolute squared-distance errors when locating points at
    /// squared distance up to `scale` from the base: `scale / lambda_min`.
    pub(crate) fn amplification(&self, scale: f64) -> f64 {
        if self.dim == 0 {
            return 1.0;
        }
        scale.max(self.scale) / self.min_eigenvalue
    }

    fn coordinates(&self, to_base: &[f64]) -> (Vec<f64>, f64) {
        let d = self.dim;
        debug_assert_eq!(to_base.len(), d + 1);
        let mut x = vec![0.0; d];
        for i in 0..d {
            let mut s = 0.5 * (to_base[0] + self.anchor_sq[i] - to_base[i + 1]);
            for k in 0..i {
                s -= self.chol[i * d + k] * x[k];
            }
            x[i] = s / self.chol[i * d + i];
        }
        let norm: f64 = x.iter().map(|c| c * c).sum();
        let residual = to_base[0] - norm;
        (x, residual)
    }

    /// Squared distance from a point to the affine span of the base.
    pub(crate) fn height2(&self, to_base: &[f64]) -> f64 {
        self.coordinates(to_base).1
    }

    /// Coordinates of a point in the span of the base, given its squared
    /// distances to the `d + 1` base points. A residual beyond the tolerance
    /// plus `slack` means the distances fit no point of the span.
    pub(crate) fn locate(
        &self,
        to_base: &[f64],
        tol: &Tolerance,
        slack: f64,
    ) -> Result<Vec<f64>, GeometryError> {
        let d = self.dim;
        let (x, residual) = self.coordinates(to_base);
        let scale = to_base.iter().fold(self.scale, |a, &b| a.max(b));
        if residual.abs() > tol.residual_floor(scale) + slack {
            return Err(GeometryError::InconsistentDistances { dim: d, residual });
        }
        Ok(x)
    }
}

/// Infers the single unknown entry of a `(d + 3) x (d + 3)` matrix of squared
/// distances whose points are assumed to lie in a `d`-dimensional subspace.
///
/// The remaining `d + 1` points form the base `T`. If `T` is independent, both
/// endpoints embed uniquely in its span and the squared distance is read off.
pub fn recover_missing_distance(
    known: &SquaredDistanceMatrix,
    d: usize,
    tol: &Tolerance,
) -> Result<MissingDistance, GeometryError> {
    if known.n() != d + 3 {
        return Err(GeometryError::WrongCardinality {
            expected: d + 3,
            got: known.n(),
        });
    }
    known.validate()?;
    let missing = known.missing_pairs();
    if missing.len() != 1 {
        return Err(GeometryError::MissingPairCount(missing.len()));
    }
    let (u, v) = missing[0];
    let base: Vec<usize> = (0..known.n()).filter(|&i| i != u && i != v).collect();
    let Some(frame) = BaseFrame::new(base.len(), |i, j| known.at(base[i], base[j]), tol) else {
        return Ok(MissingDistance::Dependent);
    };
    let du: Vec<f64> = base.iter().map(|&t| known.at(u, t)).collect();
    let dv: Vec<f64> = base.iter().map(|&t| known.at(v, t)).collect();
    let xu = frame.locate(&du, tol, 0.0)?;
    let xv = frame.locate(&dv, tol, 0.0)?;
    Ok(MissingDistance::Determined(
        xu.iter().zip(&xv).map(|(a, b)| (a - b) * (a - b)).sum(),
    ))
}

/// Dimension of the affine span of a point multiset (0 for coincident points).
pub fn affine_dimension(p: &PointConfig, tol: &Tolerance) -> Result<usize, GeometryError> {
    if p.is_empty() {
        return Err(GeometryError::EmptyInput);
    }
    let origin = p.point(0);
    let diffs: Vec<Vec<f64>> = p.points()[1..]
        .iter()
        .map(|q| q.iter().zip(origin).map(|(a, b)| a - b).collect())
        .collect();
    if diffs.is_empty() || p.dim() == 0 {
        return Ok(0);
    }
    if tol.exact_mode {
        return Ok(exact::rank(&diffs));
    }
    let m = DMatrix::from_fn(diffs.len(), p.dim(), |i, j| diffs[i][j]);
    let scatter = if diffs.len() < p.dim() {
        &m * m.transpose()
    } else {
        m.transpose() * &m
    };
    let trace = scatter.trace();
    if trace <= 0.0 {
        return Ok(0);
    }
    let floor = tol.eigen_floor(trace);
    Ok(scatter
        .symmetric_eigenvalues()
        .iter()
        .filter(|&&l| l > floor)
        .count())
}

/// Orthogonal projection of `x` onto the affine span of `basis`, with the
/// squared distance from `x` to that span.
pub fn project_onto_span(
    x: &[f64],
    basis: &[Vec<f64>],
    tol: &Tolerance,
) -> Result<(Vec<f64>, f64), GeometryError> {
    let Some(origin) = basis.first() else {
        return Err(GeometryError::EmptyInput);
    };
    let dim = x.len();
    for b in basis {
        if b.len() != dim {
            return Err(GeometryError::DimensionMismatch {
                expected: dim,
                got: b.len(),
            });
        }
    }
    let dirs: Vec<Vec<f64>> = basis[1..]
        .iter()
        .map(|b| b.iter().zip(origin).map(|(a, o)| a - o).collect())
        .collect();
    let k = dirs.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    let gram = DMatrix::from_fn(k, k, |i, j| dot(&dirs[i], &dirs[j]));
    if !matrix_is_positive_definite(&gram, tol) {
        return Err(GeometryError::DegenerateBasis);
    }
    let offset: Vec<f64> = x.iter().zip(origin).map(|(a, o)| a - o).collect();
    let rhs = DVector::from_fn(k, |i, _| dot(&offset, &dirs[i]));
    let coeffs = if k == 0 {
        DVector::zeros(0)
    } else {
        gram.cholesky()
            .ok_or(GeometryError::DegenerateBasis)?
            .solve(&rhs)
    };
    let mut proj = origin.clone();
    for (c, dir) in coeffs.iter().zip(&dirs) {
        for (p, d) in proj.iter_mut().zip(dir) {
            *p += c * d;
        }
    }
    let residual = x.iter().zip(&proj).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((proj, residual))
}
