use std::collections::HashSet;

use itertools::Itertools;
use rand::seq::index::sample;
use serde::Serialize;

use super::instance::choose;
use super::SimError;
use crate::geometry::{affine_dimension, squared_distance, PointConfig, Tolerance};
use crate::harness::eta;
use crate::seed::trial_rng;

/// Largest number of subsets any enumeration here will visit.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;
/// Spanning subsets drawn per dimension when exhaustive search is too large.
const SAMPLED_SPANS: usize = 20_000;

fn is_dependent(
    p: &PointConfig,
    subset: &[usize],
    d: usize,
    tol: &Tolerance,
) -> Result<bool, SimError> {
    Ok(affine_dimension(&p.select(subset), tol)? < d)
}

fn guard(n: usize, k: usize) -> Result<(), SimError> {
    let count = choose(n, k);
    if count > ENUMERATION_LIMIT {
        return Err(SimError::TooLarge {
            count,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

/// Every `(d+1)`-subset of `p` that lies in a `(d-1)`-dimensional affine
/// subspace, in lexicographic order.
pub fn dependent_families(
    p: &PointConfig,
    d: usize,
    tol: &Tolerance,
) -> Result<Vec<Vec<usize>>, SimError> {
    guard(p.len(), d + 1)?;
    let mut out = Vec::new();
    for subset in (0..p.len()).combinations(d + 1) {
        if is_dependent(p, &subset, d, tol)? {
            out.push(subset);
        }
    }
    Ok(out)
}

pub fn dependent_family_count(
    p: &PointConfig,
    d: usize,
    tol: &Tolerance,
) -> Result<u128, SimError> {
    guard(p.len(), d + 1)?;
    let mut count = 0u128;
    for subset in (0..p.len()).combinations(d + 1) {
        count += u128::from(is_dependent(p, &subset, d, tol)?);
    }
    Ok(count)
}

/// Midpoint of the admissible interval `((1/eta(d))^(1/d), 1)`.
pub fn default_mu(d: usize) -> f64 {
    let e = eta(d).map_or(2.0, |r| *r.numer() as f64 / *r.denom() as f64);
    let low = (1.0 / e).powf(1.0 / d.max(1) as f64);
    (low + 1.0) / 2.0
}

/// An affine subspace holding many points but few degenerate families.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenseSubspace {
    pub dim: usize,
    pub origin: Vec<f64>,
    /// Orthonormal directions.
    pub basis: Vec<Vec<f64>>,
    /// Indices of the points lying in the subspace, sorted.
    pub members: Vec<usize>,
    /// Number of `dim`-dependent `(dim+1)`-subsets of the members.
    pub dependent_families: u128,
    /// `n^(mu^(d - dim))`.
    pub required_count: f64,
    /// `d * |members|^(dim + mu)`.
    pub family_bound: f64,
    /// False when spanning subsets were sampled rather than enumerated.
    pub complete: bool,
}

impl DenseSubspace {
    pub fn satisfies_bounds(&self) -> bool {
        self.members.len() as f64 >= self.required_count
            && self.dependent_families as f64 <= self.family_bound
    }
}

fn orthonormal_span(p: &PointConfig, span: &[usize]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let origin = p.point(span[0]).to_vec();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for &i in &span[1..] {
        let mut v: Vec<f64> = p.point(i).iter().zip(&origin).map(|(a, b)| a - b).collect();
        for b in &basis {
            let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    (origin, basis)
}

/// Squared distance from `x` to the affine span, and squared length of its projection.
fn split_offset(x: &[f64], origin: &[f64], basis: &[Vec<f64>]) -> (f64, f64) {
    let mut rest: Vec<f64> = x.iter().zip(origin).map(|(a, b)| a - b).collect();
    let mut along = 0.0;
    for b in basis {
        let c: f64 = rest.iter().zip(b).map(|(x, y)| x * y).sum();
        rest.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        along += c * c;
    }
    (rest.iter().map(|x| x * x).sum(), along)
}

fn spanning_subsets(n: usize, k: usize, seed: u64) -> (Box<dyn Iterator<Item = Vec<usize>>>, bool) {
    if choose(n, k) <= ENUMERATION_LIMIT {
        return (Box::new((0..n).combinations(k)), true);
    }
    let mut rng = trial_rng(seed, k as u64);
    let draws: Vec<Vec<usize>> = (0..SAMPLED_SPANS)
        .map(|_| sample(&mut rng, n, k).into_iter().sorted().collect())
        .collect();
    (Box::new(draws.into_iter()), false)
}

/// Searches affine subspaces spanned by point subsets, lowest dimension first
/// and then by member count, for one holding at least `n^(mu^(d-d'))` points
/// and at most `d * m^(d'+mu)` of its own `d'`-dependent families. Falls back
/// to the whole space.
pub fn find_dense_subspace(
    p: &PointConfig,
    mu: f64,
    tol: &Tolerance,
) -> Result<DenseSubspace, SimError> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(SimError::InvalidMu(mu));
    }
    let n = p.len();
    if n == 0 {
        return Err(SimError::InvalidSpec(
            "find_dense_subspace needs at least one point".into(),
        ));
    }
    let d = p.dim();
    let mut complete = true;
    for dprime in 0..d {
        let required = (n as f64).powf(mu.powi((d - dprime) as i32));
        let (spans, exhaustive) = spanning_subsets(n, dprime + 1, 0);
        complete &= exhaustive;
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut best: Option<DenseSubspace> = None;
        for span in spans {
            if affine_dimension(&p.select(&span), tol)? != dprime {
                continue;
            }
            let (origin, basis) = orthonormal_span(p, &span);
            let reach = span
                .iter()
                .map(|&j| squared_distance(p.point(j), &origin))
                .fold(0.0, f64::max);
            let mut members = Vec::new();
            let mut probe = span.clone();
            for i in 0..n {
                let inside = if tol.exact_mode {
                    probe.push(i);
                    let dim = affine_dimension(&p.select(&probe), tol)?;
                    probe.pop();
                    dim == dprime
                } else {
                    let (off, along) = split_offset(p.point(i), &origin, &basis);
                    off <= tol.eigen_floor(reach.max(along + off))
                };
                if inside {
                    members.push(i);
                }
            }
            if (members.len() as f64) < required
                || best
                    .as_ref()
                    .is_some_and(|b| b.members.len() >= members.len())
            {
                continue;
            }
            if !seen.insert(members.clone()) {
                continue;
            }
            let dependent = match dependent_family_count(&p.select(&members), dprime, tol) {
                Ok(c) => c,
                Err(SimError::TooLarge { .. }) => {
                    complete = false;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let family_bound = d as f64 * (members.len() as f64).powf(dprime as f64 + mu);
            let candidate = DenseSubspace {
                dim: dprime,
                origin,
                basis,
                members,
                dependent_families: dependent,
                required_count: required,
                family_bound,
                complete,
            };
            if candidate.satisfies_bounds() {
                best = Some(candidate);
            }
        }
        if let Some(mut found) = best {
            found.complete = complete;
            return Ok(found);
        }
    }
    let dependent = dependent_family_count(p, d, tol)?;
    let whole = DenseSubspace {
        dim: d,
        origin: vec![0.0; d],
        basis: (0..d)
            .map(|k| (0..d).map(|j| f64::from(u8::from(j == k))).collect())
            .collect(),
        members: (0..n).collect(),
        dependent_families: dependent,
        required_count: n as f64,
        family_bound: d as f64 * (n as f64).powf(d as f64 + mu),
        complete,
    };
    Ok(whole)
}
