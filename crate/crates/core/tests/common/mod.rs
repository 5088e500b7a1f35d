//! Reference implementations used as oracles by the integration tests.
#![allow(dead_code)]

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use distance_recon::percolation::{PollutionSet, SimpleGraph};

/// Fixed point of scanning every non-edge for a `(d+1)`-clique base in its
/// common neighbourhood that is not polluted, adding edges as soon as found.
pub fn naive_polluted_closure(g: &SimpleGraph, d: usize, pollution: &PollutionSet) -> SimpleGraph {
    let mut g = g.clone();
    loop {
        let mut changed = false;
        for u in 0..g.n() {
            for v in (u + 1)..g.n() {
                if g.has_edge(u, v) {
                    continue;
                }
                let common = g.common_neighbors(u, v);
                let found = common
                    .iter()
                    .copied()
                    .combinations(d + 1)
                    .any(|base| g.is_clique(&base) && !pollution.contains_sorted(&base));
                if found {
                    g.add_edge(u, v);
                    changed = true;
                }
            }
        }
        if !changed {
            return g;
        }
    }
}

/// Rank of an integer matrix by fraction-exact Gaussian elimination.
pub fn rational_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] / &m[rank][c];
                let pivot_row = m[rank].clone();
                for (x, p) in m[r].iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Affine dimension of integer points, exactly.
pub fn affine_rank(points: &[Vec<i64>]) -> usize {
    let Some((first, rest)) = points.split_first() else {
        return 0;
    };
    let diffs: Vec<Vec<i64>> = rest
        .iter()
        .map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect())
        .collect();
    rational_rank(&diffs)
}

pub fn integer_squared_distance(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
