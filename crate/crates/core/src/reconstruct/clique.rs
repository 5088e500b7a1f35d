use super::{DistanceState, ReconstructError};

/// Vertices whose closed known-neighbourhood exceeds `(1 - delta) n`, pruned
/// greedily until every pair inside is known.
///
/// Each pruning step drops the vertex missing the most pairs within the
/// current set, preferring the larger index on ties.
pub fn extract_reconstructible_clique(
    s: &DistanceState,
    delta: f64,
) -> Result<Vec<usize>, ReconstructError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(ReconstructError::InvalidDelta(delta));
    }
    let n = s.n();
    let g = s.known_graph();
    let cutoff = (1.0 - delta) * n as f64;
    let mut set: Vec<usize> = (0..n)
        .filter(|&x| (g.degree(x) + 1) as f64 > cutoff)
        .collect();
    let mut missing: Vec<usize> = set
        .iter()
        .map(|&x| set.iter().filter(|&&y| y != x && !g.has_edge(x, y)).count())
        .collect();
    loop {
        let worst = missing
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .max_by_key(|&(pos, &m)| (m, pos))
            .map(|(pos, _)| pos);
        let Some(pos) = worst else { break };
        let x = set.remove(pos);
        missing.remove(pos);
        for (y, m) in set.iter().zip(missing.iter_mut()) {
            if !g.has_edge(x, *y) {
                *m -= 1;
            }
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reconstruct::Provenance;

    fn state(n: usize, edges: &[(usize, usize)]) -> DistanceState {
        let mut s = DistanceState::new(n);
        for &(i, j) in edges {
            s.set(i, j, 1.0, Provenance::Revealed);
        }
        s
    }

    #[test]
    fn complete_state_returns_everything() {
        for n in 1..8 {
            let edges: Vec<_> = (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .collect();
            let s = state(n, &edges);
            assert_eq!(
                extract_reconstructible_clique(&s, 0.1).unwrap(),
                (0..n).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn isolated_vertex_is_filtered_by_degree() {
        let edges: Vec<_> = (0..5)
            .flat_map(|i| ((i + 1)..5).map(move |j| (i, j)))
            .collect();
        let s = state(6, &edges);
        assert_eq!(
            extract_reconstructible_clique(&s, 0.5).unwrap(),
            vec![0, 1, 2, 3, 4]
        );
    }

    #[test]
    fn empty_state_gives_empty_set() {
        assert!(extract_reconstructible_clique(&state(5, &[]), 0.5)
            .unwrap()
            .is_empty());
        assert!(extract_reconstructible_clique(&state(5, &[]), 0.0).is_err());
    }

    #[test]
    fn greedy_pruning_drops_the_worst_vertex() {
        // K_5 minus {0,4} and {1,4}: vertex 4 misses two pairs
        let edges = [
            (0, 1),
            (0, 2),
            (0, 3),
            (1, 2),
            (1, 3),
            (2, 3),
            (2, 4),
            (3, 4),
        ];
        let s = state(5, &edges);
        assert_eq!(
            extract_reconstructible_clique(&s, 0.9).unwrap(),
            vec![0, 1, 2, 3]
        );
        // a single missing pair: ties resolve to the larger index
        let mut s = state(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]);
        assert_eq!(
            extract_reconstructible_clique(&s, 0.9).unwrap(),
            vec![0, 1, 2]
        );
        s.set(2, 3, 1.0, Provenance::Revealed);
        assert_eq!(extract_reconstructible_clique(&s, 0.9).unwrap().len(), 4);
    }
}
