//! Exact rational decisions on floating-point inputs.
//!
//! Every finite `f64` is a dyadic rational, so a matrix of floats can be
//! scaled to an integer matrix without loss and processed with fraction-free
//! (Bareiss) elimination.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Scales a float matrix to integers by the lcm of the entry denominators.
pub fn integer_matrix(rows: &[Vec<f64>]) -> Vec<Vec<BigInt>> {
    let rational: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| BigRational::from_float(x).expect("finite matrix entry"))
                .collect()
        })
        .collect();
    let mut denom = BigInt::one();
    for q in rational.iter().flatten() {
        // denominators are powers of two, so the max is the lcm
        if q.denom() > &denom {
            denom = q.denom().clone();
        }
    }
    rational
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|q| q.numer() * (&denom / q.denom()))
                .collect()
        })
        .collect()
}

/// Sylvester's criterion via Bareiss elimination without pivoting: the
/// successive pivots are the leading principal minors.
pub fn is_positive_definite(rows: &[Vec<f64>]) -> bool {
    let mut m = integer_matrix(rows);
    let k = m.len();
    let mut prev = BigInt::one();
    for p in 0..k {
        if !m[p][p].is_positive() {
            return false;
        }
        for i in (p + 1)..k {
            for j in (p + 1)..k {
                let v = &m[p][p] * &m[i][j] - &m[i][p] * &m[p][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[p][p].clone();
    }
    true
}

/// Rank by fraction-free elimination with row pivoting.
pub fn rank(rows: &[Vec<f64>]) -> usize {
    let mut m = integer_matrix(rows);
    let nrows = m.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = m[0].len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(pivot) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pivot);
        for i in (r + 1)..nrows {
            for j in (c + 1)..ncols {
                let v = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pd_on_small_matrices() {
        assert!(is_positive_definite(&[vec![16.0, 16.0], vec![16.0, 25.0]]));
        assert!(!is_positive_definite(&[vec![9.0, 6.0], vec![6.0, 4.0]]));
        assert!(!is_positive_definite(&[vec![0.0]]));
        assert!(is_positive_definite(&[]));
        assert!(is_positive_definite(&[vec![0.5, 0.25], vec![0.25, 0.5]]));
    }

    #[test]
    fn rank_with_dyadic_entries() {
        assert_eq!(rank(&[vec![1.0, 2.0], vec![0.5, 1.0]]), 1);
        assert_eq!(rank(&[vec![0.0, 1.0], vec![1.0, 0.0]]), 2);
        assert_eq!(rank(&[vec![0.0, 0.0, 0.0]]), 0);
        assert_eq!(
            rank(&[
                vec![1.0, 2.0, 3.0],
                vec![4.0, 5.0, 6.0],
                vec![7.0, 8.0, 9.0]
            ]),
            2
        );
    }
}
