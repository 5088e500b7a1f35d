use nalgebra::DMatrix;

use super::{exact, GeometryError, SquaredDistanceMatrix, Tolerance};

/// Inner products of the difference vectors `v_i - v_anchor`, `i != anchor`.
///
/// Row/column `i` corresponds to the `i`-th non-anchor point, in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    anchor: usize,
    entries: DMatrix<f64>,
}

impl GramMatrix {
    /// Wraps an explicit symmetric matrix (anchor recorded as 0).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, GeometryError> {
        let k = rows.len();
        for r in rows {
            if r.len() != k {
                return Err(GeometryError::DimensionMismatch {
                    expected: k,
                    got: r.len(),
                });
            }
        }
        let entries = DMatrix::from_fn(k, k, |i, j| rows[i][j]);
        for i in 0..k {
            for j in (i + 1)..k {
                if entries[(i, j)] != entries[(j, i)] {
                    return Err(GeometryError::Asymmetric(i, j));
                }
            }
        }
        Ok(Self { anchor: 0, entries })
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    /// Number of rows, i.e. `k - 1` for a `k`-point subset.
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.size())
            .map(|i| self.entries.row(i).iter().copied().collect())
            .collect()
    }
}

/// Computes `G_ij = (|v_i - v_r|^2 + |v_j - v_r|^2 - |v_i - v_j|^2) / 2` for the anchor `r`.
pub fn gram_from_distances(
    d: &SquaredDistanceMatrix,
    anchor: usize,
) -> Result<GramMatrix, GeometryError> {
    let k = d.n();
    if anchor >= k {
        return Err(GeometryError::AnchorOutOfRange { anchor, n: k });
    }
    d.require_complete()?;
    d.validate()?;
    let others: Vec<usize> = (0..k).filter(|&i| i != anchor).collect();
    let m = others.len();
    let mut entries = DMatrix::zeros(m, m);
    for (a, &i) in others.iter().enumerate() {
        entries[(a, a)] = d.at(i, anchor);
        for (b, &j) in others.iter().enumerate().skip(a + 1) {
            let g = 0.5 * (d.at(i, anchor) + d.at(j, anchor) - d.at(i, j));
            entries[(a, b)] = g;
            entries[(b, a)] = g;
        }
    }
    Ok(GramMatrix { anchor, entries })
}

/// Smallest eigenvalue of a symmetric matrix (`+inf` for the empty matrix).
pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    match m.nrows() {
        0 => f64::INFINITY,
        1 => m[(0, 0)],
        2 => {
            let (a, b, c) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
            let mean = 0.5 * (a + c);
            let half_gap = (0.25 * (a - c) * (a - c) + b * b).sqrt();
            let hi = mean + half_gap;
            // det / hi is more accurate than mean - half_gap when hi dominates
            if hi > 0.0 {
                (a * c - b * b) / hi
            } else {
                mean - half_gap
            }
        }
        _ => m
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min),
    }
}

/// `lambda_min / trace`, the scale-free conditioning of a Gram matrix.
///
/// Returns `+inf` for the empty matrix and `0` (or below) for singular ones.
pub(crate) fn conditioning(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    let trace = m.trace();
    if trace <= 0.0 {
        return 0.0;
    }
    min_eigenvalue(m) / trace
}

/// Float or exact positive-definiteness, per `tol.exact_mode`.
pub fn is_positive_definite(g: &GramMatrix, tol: &Tolerance) -> bool {
    matrix_is_positive_definite(&g.entries, tol)
}

pub(crate) fn matrix_is_positive_definite(m: &DMatrix<f64>, tol: &Tolerance) -> bool {
    if m.nrows() == 0 {
        return true;
    }
    if tol.exact_mode {
        // 2G is exactly the float half-sum numerator, so integer inputs stay exact
        let doubled: Vec<Vec<f64>> = (0..m.nrows())
            .map(|i| m.row(i).iter().map(|x| 2.0 * x).collect())
            .collect();
        return exact::is_positive_definite(&doubled);
    }
    let trace = m.trace();
    trace > 0.0 && min_eigenvalue(m) > tol.eigen_floor(trace)
}

/// Whether `d + 1` points with the given complete distance matrix are
/// `d`-independent, i.e. span an affine subspace of dimension `d`.
pub fn is_independent(
    dists: &SquaredDistanceMatrix,
    d: usize,
    tol: &Tolerance,
) -> Result<bool, GeometryError> {
    if dists.n() != d + 1 {
        return Err(GeometryError::WrongCardinality {
            expected: d + 1,
            got: dists.n(),
        });
    }
    let g = gram_from_distances(dists, d)?;
    Ok(is_positive_definite(&g, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sdm(rows: &[&[f64]]) -> SquaredDistanceMatrix {
        SquaredDistanceMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
            .unwrap()
    }

    // side lengths 3, 4, 5 as |v1v2|, |v1v3|, |v2v3|
    fn triangle_345() -> SquaredDistanceMatrix {
        sdm(&[&[0.0, 9.0, 16.0], &[9.0, 0.0, 25.0], &[16.0, 25.0, 0.0]])
    }

    #[test]
    fn gram_of_345_triangle_anchored_at_third_point() {
        let g = gram_from_distances(&triangle_345(), 2).unwrap();
        assert_eq!(g.rows(), vec![vec![16.0, 16.0], vec![16.0, 25.0]]);
        // coordinates: v3 = (0,0), v1 = (4,0), v2 = (4,3): <u1,u2> = 16
        let (u1, u2) = ([4.0, 0.0], [4.0, 3.0]);
        assert_eq!(u1[0] * u2[0] + u1[1] * u2[1], g.get(0, 1));
    }

    #[test]
    fn gram_of_two_identical_points() {
        let g = gram_from_distances(&sdm(&[&[0.0, 0.0], &[0.0, 0.0]]), 1).unwrap();
        assert_eq!(g.rows(), vec![vec![0.0]]);
    }

    #[test]
    fn gram_of_collinear_points() {
        // points at 0, 1, 3, anchored at 3
        let d = sdm(&[&[0.0, 1.0, 9.0], &[1.0, 0.0, 4.0], &[9.0, 4.0, 0.0]]);
        let g = gram_from_distances(&d, 2).unwrap();
        assert_eq!(g.rows(), vec![vec![9.0, 6.0], vec![6.0, 4.0]]);
        assert_eq!(g.matrix().determinant(), 0.0);
    }

    #[test]
    fn gram_rejects_incomplete_and_negative_input() {
        let mut d = SquaredDistanceMatrix::unknown(3);
        d.set(0, 1, 1.0);
        assert!(matches!(
            gram_from_distances(&d, 0),
            Err(GeometryError::Incomplete(..))
        ));
        let bad = SquaredDistanceMatrix::from_entries(
            2,
            vec![Some(0.0), Some(-1.0), Some(-1.0), Some(0.0)],
        );
        assert!(bad.is_err());
        assert!(matches!(
            gram_from_distances(&triangle_345(), 3),
            Err(GeometryError::AnchorOutOfRange { .. })
        ));
    }

    #[test]
    fn positive_definiteness_examples() {
        for tol in [Tolerance::default(), Tolerance::exact()] {
            let pd = GramMatrix::from_rows(&[vec![16.0, 16.0], vec![16.0, 25.0]]).unwrap();
            assert!(is_positive_definite(&pd, &tol));
            let singular = GramMatrix::from_rows(&[vec![9.0, 6.0], vec![6.0, 4.0]]).unwrap();
            assert!(!is_positive_definite(&singular, &tol));
            let one = GramMatrix::from_rows(&[vec![1.0]]).unwrap();
            assert!(is_positive_definite(&one, &tol));
        }
    }

    #[test]
    fn independence_examples() {
        let tol = Tolerance::default();
        assert!(is_independent(&triangle_345(), 2, &tol).unwrap());
        let collinear = sdm(&[&[0.0, 1.0, 9.0], &[1.0, 0.0, 4.0], &[9.0, 4.0, 0.0]]);
        assert!(!is_independent(&collinear, 2, &tol).unwrap());
        assert!(is_independent(&SquaredDistanceMatrix::unknown(1), 0, &tol).unwrap());
        assert!(matches!(
            is_independent(&triangle_345(), 1, &tol),
            Err(GeometryError::WrongCardinality { .. })
        ));
    }

    #[test]
    fn closed_form_min_eigenvalue_matches_nalgebra() {
        let m = DMatrix::from_row_slice(2, 2, &[3.0, 1.5, 1.5, 0.75 + 1e-7]);
        let reference = m
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        assert!((min_eigenvalue(&m) - reference).abs() < 1e-12);
    }
}
