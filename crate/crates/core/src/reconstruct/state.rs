use serde::{Deserialize, Serialize};

use super::ReconstructError;
use crate::geometry::SquaredDistanceMatrix;
use crate::percolation::SimpleGraph;

/// How a known squared distance entered the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Revealed,
    Inferred,
    Reduced,
}

/// Partially known symmetric matrix of squared distances. The mask doubles as
/// the graph the closure engine percolates on.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceState {
    n: usize,
    known: SimpleGraph,
    dist2: Vec<f64>,
    provenance: Vec<Option<Provenance>>,
}

impl DistanceState {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            known: SimpleGraph::empty(n),
            dist2: vec![0.0; n * n],
            provenance: vec![None; n * n],
        }
    }

    /// A state whose entries are all `Revealed`.
    pub fn from_pairs(
        n: usize,
        pairs: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, ReconstructError> {
        let mut s = Self::new(n);
        for (i, j, d2) in pairs {
            if i >= n || j >= n || i == j {
                return Err(ReconstructError::InvalidPair { i, j, n });
            }
            if !(d2.is_finite() && d2 >= 0.0) {
                return Err(ReconstructError::InvalidDistance { i, j, value: d2 });
            }
            s.set(i, j, d2, Provenance::Revealed);
        }
        Ok(s)
    }

    /// Every pair of a complete matrix, marked `Revealed`.
    pub fn from_matrix(m: &SquaredDistanceMatrix) -> Self {
        let mut s = Self::new(m.n());
        for i in 0..m.n() {
            for j in (i + 1)..m.n() {
                if let Some(d2) = m.get(i, j) {
                    s.set(i, j, d2, Provenance::Revealed);
                }
            }
        }
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_known(&self, i: usize, j: usize) -> bool {
        i == j || self.known.has_edge(i, j)
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        if i == j {
            Some(0.0)
        } else if self.known.has_edge(i, j) {
            Some(self.dist2[i * self.n + j])
        } else {
            None
        }
    }

    /// Value of a pair the caller knows to be present.
    pub(crate) fn value(&self, i: usize, j: usize) -> f64 {
        self.dist2[i * self.n + j]
    }

    pub fn provenance(&self, i: usize, j: usize) -> Option<Provenance> {
        self.provenance[i * self.n + j]
    }

    /// Sets a pair symmetrically, overwriting any previous value.
    pub fn set(&mut self, i: usize, j: usize, d2: f64, prov: Provenance) {
        if i == j {
            return;
        }
        self.known.add_edge(i, j);
        for (a, b) in [(i, j), (j, i)] {
            self.dist2[a * self.n + b] = d2;
            self.provenance[a * self.n + b] = Some(prov);
        }
    }

    pub fn known_graph(&self) -> &SimpleGraph {
        &self.known
    }

    pub fn known_pairs(&self) -> usize {
        self.known.edge_count()
    }

    /// Share of the `n(n-1)/2` pairs that are known (1 when there are none).
    pub fn known_fraction(&self) -> f64 {
        let total = self.n * self.n.saturating_sub(1) / 2;
        if total == 0 {
            1.0
        } else {
            self.known_pairs() as f64 / total as f64
        }
    }

    pub fn is_complete(&self) -> bool {
        self.known.is_complete()
    }

    /// Known pairs `(i, j, dist2, provenance)` with `i < j`, lexicographically.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64, Provenance)> + '_ {
        self.known.edges().map(move |(i, j)| {
            let k = i * self.n + j;
            (
                i,
                j,
                self.dist2[k],
                self.provenance[k].expect("known pair has provenance"),
            )
        })
    }

    /// Keeps only the entries with the given provenance.
    pub fn filtered(&self, keep: Provenance) -> Self {
        let mut out = Self::new(self.n);
        for (i, j, d2, p) in self.pairs() {
            if p == keep {
                out.set(i, j, d2, p);
            }
        }
        out
    }

    /// Sub-state on `indices`, renumbered in the given order.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        let mut out = Self::new(indices.len());
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate().skip(a + 1) {
                if let (Some(d2), Some(p)) = (self.get(i, j), self.provenance(i, j)) {
                    out.set(a, b, d2, p);
                }
            }
        }
        out
    }

    pub fn to_matrix(&self) -> SquaredDistanceMatrix {
        let mut m = SquaredDistanceMatrix::unknown(self.n);
        for (i, j, d2, _) in self.pairs() {
            m.set(i, j, d2);
        }
        m
    }

    /// Largest known squared distance.
    pub fn scale(&self) -> f64 {
        self.pairs().map(|(_, _, d2, _)| d2).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_storage_and_provenance() {
        let mut s = DistanceState::new(4);
        s.set(2, 1, 5.0, Provenance::Revealed);
        s.set(0, 3, 1.5, Provenance::Inferred);
        assert_eq!(s.get(1, 2), Some(5.0));
        assert_eq!(s.get(3, 3), Some(0.0));
        assert_eq!(s.get(0, 1), None);
        assert_eq!(s.provenance(3, 0), Some(Provenance::Inferred));
        assert_eq!(s.known_pairs(), 2);
        assert!((s.known_fraction() - 2.0 / 6.0).abs() < 1e-15);
        let revealed = s.filtered(Provenance::Revealed);
        assert_eq!(revealed.known_pairs(), 1);
        let sub = s.restrict(&[2, 1]);
        assert_eq!(sub.get(0, 1), Some(5.0));
        assert_eq!(s.scale(), 5.0);
    }

    #[test]
    fn invalid_pairs_are_rejected() {
        assert!(DistanceState::from_pairs(3, [(0, 3, 1.0)]).is_err());
        assert!(DistanceState::from_pairs(3, [(1, 1, 0.0)]).is_err());
        assert!(DistanceState::from_pairs(3, [(0, 1, -1.0)]).is_err());
        assert!(DistanceState::from_pairs(3, [(0, 1, f64::NAN)]).is_err());
    }
}
