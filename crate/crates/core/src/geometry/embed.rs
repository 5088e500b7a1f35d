use nalgebra::DMatrix;

use super::gram::gram_from_distances;
use super::{exact, GeometryError, PointConfig, SquaredDistanceMatrix, Tolerance};

/// Classical embedding together with the spectrum it was read from.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub points: PointConfig,
    /// Gram eigenvalues in descending order.
    pub eigenvalues: Vec<f64>,
    /// Affine dimension of the input under the tolerance.
    pub rank: usize,
}

/// Reconstructs coordinates in `R^target_dim` from a complete matrix of squared
/// distances. Point 0 is placed at the origin.
pub fn embed_from_distances(
    d: &SquaredDistanceMatrix,
    target_dim: usize,
    tol: &Tolerance,
) -> Result<PointConfig, GeometryError> {
    embed_with_spectrum(d, target_dim, tol).map(|e| e.points)
}

pub fn embed_with_spectrum(
    d: &SquaredDistanceMatrix,
    target_dim: usize,
    tol: &Tolerance,
) -> Result<Embedding, GeometryError> {
    let n = d.n();
    if n == 0 {
        return Ok(Embedding {
            points: PointConfig::empty(target_dim),
            eigenvalues: Vec::new(),
            rank: 0,
        });
    }
    let g = gram_from_distances(d, 0)?;
    let m = g.size();
    if m == 0 {
        return Ok(Embedding {
            points: PointConfig::new(target_dim, vec![vec![0.0; target_dim]])?,
            eigenvalues: Vec::new(),
            rank: 0,
        });
    }

    let eig = g.matrix().clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();

    let trace = g.trace().max(0.0);
    let floor = tol.eigen_floor(trace);
    if let Some(&lowest) = eigenvalues.last() {
        if lowest < -floor {
            return Err(GeometryError::NonEuclidean { eigenvalue: lowest });
        }
    }
    let rank = if tol.exact_mode {
        let doubled: Vec<Vec<f64>> = g
            .rows()
            .into_iter()
            .map(|r| r.into_iter().map(|x| 2.0 * x).collect())
            .collect();
        exact::rank(&doubled)
    } else {
        eigenvalues.iter().filter(|&&l| l > floor).count()
    };
    if rank > target_dim {
        return Err(GeometryError::RankTooHigh {
            rank,
            target: target_dim,
        });
    }

    let kept = target_dim.min(m);
    let mut vectors = DMatrix::<f64>::zeros(m, kept);
    for (c, &src) in order.iter().take(kept).enumerate() {
        let mut col: Vec<f64> = eig.eigenvectors.column(src).iter().copied().collect();
        // sign convention: first clearly nonzero component is positive
        if let Some(first) = col.iter().copied().find(|x| x.abs() > 1e-10) {
            if first < 0.0 {
                col.iter_mut().for_each(|x| *x = -*x);
            }
        }
        let scale = eigenvalues[c].max(0.0).sqrt();
        for (r, x) in col.into_iter().enumerate() {
            vectors[(r, c)] = x * scale;
        }
    }

    let mut points = Vec::with_capacity(n);
    points.push(vec![0.0; target_dim]);
    for r in 0..m {
        let mut p = vec![0.0; target_dim];
        for (c, slot) in p.iter_mut().enumerate().take(kept) {
            *slot = vectors[(r, c)];
        }
        points.push(p);
    }
    Ok(Embedding {
        points: PointConfig::new(target_dim, points)?,
        eigenvalues,
        rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_error(d: &SquaredDistanceMatrix, p: &PointConfig) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..d.n() {
            for j in 0..d.n() {
                worst = worst.max((d.at(i, j) - p.squared_distance(i, j)).abs());
            }
        }
        worst
    }

    #[test]
    fn unit_square_round_trip() {
        let rows = vec![
            vec![0.0, 1.0, 2.0, 1.0],
            vec![1.0, 0.0, 1.0, 2.0],
            vec![2.0, 1.0, 0.0, 1.0],
            vec![1.0, 2.0, 1.0, 0.0],
        ];
        let d = SquaredDistanceMatrix::from_rows(&rows).unwrap();
        let p = embed_from_distances(&d, 2, &Tolerance::default()).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.point(0), &[0.0, 0.0]);
        assert!(max_error(&d, &p) < 1e-9);
    }

    #[test]
    fn single_point_embeds_with_no_coordinates() {
        let d = SquaredDistanceMatrix::unknown(1);
        let p = embed_from_distances(&d, 0, &Tolerance::default()).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.dim(), 0);
        assert!(p.point(0).is_empty());
    }

    #[test]
    fn triangle_does_not_fit_on_a_line() {
        let d = SquaredDistanceMatrix::from_rows(&[
            vec![0.0, 9.0, 16.0],
            vec![9.0, 0.0, 25.0],
            vec![16.0, 25.0, 0.0],
        ])
        .unwrap();
        for tol in [Tolerance::default(), Tolerance::exact()] {
            assert!(matches!(
                embed_from_distances(&d, 1, &tol),
                Err(GeometryError::RankTooHigh { rank: 2, target: 1 })
            ));
        }
    }

    #[test]
    fn violated_triangle_inequality_is_non_euclidean() {
        let d = SquaredDistanceMatrix::from_rows(&[
            vec![0.0, 1.0, 16.0],
            vec![1.0, 0.0, 1.0],
            vec![16.0, 1.0, 0.0],
        ])
        .unwrap();
        assert!(matches!(
            embed_from_distances(&d, 2, &Tolerance::default()),
            Err(GeometryError::NonEuclidean { .. })
        ));
    }

    #[test]
    fn embedding_is_deterministic_and_pads_extra_dimensions() {
        let pts = PointConfig::new(1, vec![vec![0.0], vec![2.0], vec![5.0]]).unwrap();
        let d = pts.distance_matrix();
        let a = embed_from_distances(&d, 3, &Tolerance::default()).unwrap();
        let b = embed_from_distances(&d, 3, &Tolerance::default()).unwrap();
        assert_eq!(a, b);
        assert!(max_error(&d, &a) < 1e-12);
        assert!(a.points().iter().all(|p| p[1].abs() < 1e-6 && p[2] == 0.0));
    }
}
