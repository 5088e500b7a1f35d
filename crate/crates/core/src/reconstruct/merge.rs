use super::{DistanceState, Provenance, ReconstructError};
use crate::geometry::Tolerance;

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Components of the graph of known pairs with squared distance at most
/// `tol.eps_rel`, each sorted, ordered by smallest member.
///
/// Points in one component are treated as coincident, so their known
/// distances to any third point must agree up to the chain of tolerances.
pub fn merge_duplicates(
    s: &DistanceState,
    tol: &Tolerance,
) -> Result<Vec<Vec<usize>>, ReconstructError> {
    let n = s.n();
    let threshold = tol.eps_rel;
    let mut parent: Vec<usize> = (0..n).collect();
    for (i, j, d2, _) in s.pairs() {
        if d2 <= threshold {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for x in 0..n {
        let root = find(&mut parent, x);
        groups[root].push(x);
    }
    let components: Vec<Vec<usize>> = groups.into_iter().filter(|g| !g.is_empty()).collect();

    for comp in components.iter().filter(|c| c.len() > 1) {
        let slack = comp.len() as f64 * threshold.sqrt() * (1.0 + 1e-6);
        for z in 0..n {
            let mut first: Option<(usize, f64)> = None;
            for &x in comp {
                if x == z {
                    continue;
                }
                let Some(d2) = s.get(x, z) else { continue };
                match first {
                    None => first = Some((x, d2)),
                    Some((a, da)) => {
                        let (ra, rb) = (da.sqrt(), d2.sqrt());
                        if (ra - rb).abs() > slack + 1e-12 * (1.0 + ra.max(rb)) {
                            return Err(ReconstructError::ZeroConflict { a, b: x, third: z });
                        }
                    }
                }
            }
        }
    }
    Ok(components)
}

/// Copies each point's known distances to the other members of its
/// component, taking the value from the lowest-indexed member that knows it.
/// Members are set to distance 0 from each other. Returns the number of
/// newly known pairs.
pub fn share_component_distances(s: &mut DistanceState, components: &[Vec<usize>]) -> usize {
    let before = s.known_pairs();
    for comp in components.iter().filter(|c| c.len() > 1) {
        for (a, &x) in comp.iter().enumerate() {
            for &y in &comp[a + 1..] {
                if !s.is_known(x, y) {
                    s.set(x, y, 0.0, Provenance::Inferred);
                }
            }
        }
        for z in 0..s.n() {
            if comp.binary_search(&z).is_ok() {
                continue;
            }
            let Some(value) = comp.iter().find_map(|&x| s.get(x, z)) else {
                continue;
            };
            for &x in comp {
                if !s.is_known(x, z) {
                    s.set(x, z, value, Provenance::Inferred);
                }
            }
        }
    }
    s.known_pairs() - before
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_distances_chain_into_one_component() {
        let s = DistanceState::from_pairs(3, [(0, 1, 0.0), (1, 2, 0.0)]).unwrap();
        let parts = merge_duplicates(&s, &Tolerance::default()).unwrap();
        assert_eq!(parts, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn no_zero_distances_gives_singletons() {
        let s = DistanceState::from_pairs(3, [(0, 1, 1.0), (1, 2, 4.0)]).unwrap();
        let parts = merge_duplicates(&s, &Tolerance::default()).unwrap();
        assert_eq!(parts, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn separate_clusters_keep_cross_distances_unknown() {
        let mut s = DistanceState::from_pairs(4, [(0, 1, 0.0), (2, 3, 0.0)]).unwrap();
        let parts = merge_duplicates(&s, &Tolerance::default()).unwrap();
        assert_eq!(parts, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(share_component_distances(&mut s, &parts), 0);
        assert!(!s.is_known(0, 2));
    }

    #[test]
    fn sharing_spreads_distances_across_a_component() {
        let mut s = DistanceState::from_pairs(4, [(0, 1, 0.0), (1, 2, 0.0), (2, 3, 9.0)]).unwrap();
        let parts = merge_duplicates(&s, &Tolerance::default()).unwrap();
        assert_eq!(share_component_distances(&mut s, &parts), 3);
        assert_eq!(s.get(0, 3), Some(9.0));
        assert_eq!(s.get(0, 2), Some(0.0));
        assert!(s.is_complete());
    }

    #[test]
    fn conflicting_distances_are_reported() {
        let s = DistanceState::from_pairs(3, [(0, 1, 0.0), (0, 2, 1.0), (1, 2, 4.0)]).unwrap();
        assert!(matches!(
            merge_duplicates(&s, &Tolerance::default()),
            Err(ReconstructError::ZeroConflict {
                a: 0,
                b: 1,
                third: 2
            })
        ));
    }
}
