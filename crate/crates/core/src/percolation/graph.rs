use std::fmt::Write as _;

use super::PercolationError;

/// Undirected simple graph on `[n]` stored as adjacency bitsets.
#[derive(Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
}

impl std::fmt::Debug for SimpleGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SimpleGraph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl SimpleGraph {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Self {
            n,
            words,
            adj: vec![0; n * words],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in (u + 1)..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, PercolationError> {
        let mut g = Self::empty(n);
        for (u, v) in edges {
            g.check_pair(u, v)?;
            g.add_edge(u, v);
        }
        Ok(g)
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<(), PercolationError> {
        for x in [u, v] {
            if x >= self.n {
                return Err(PercolationError::VertexOutOfRange {
                    vertex: x,
                    n: self.n,
                });
            }
        }
        if u == v {
            return Err(PercolationError::SelfLoop(u));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of `u64` words per adjacency row.
    pub(crate) fn words(&self) -> usize {
        self.words
    }

    pub(crate) fn row(&self, u: usize) -> &[u64] {
        &self.adj[u * self.words..(u + 1) * self.words]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    /// Adds `uv`; returns whether it was new. Loops are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v || self.has_edge(u, v) {
            return false;
        }
        self.adj[u * self.words + v / 64] |= 1 << (v % 64);
        self.adj[v * self.words + u / 64] |= 1 << (u % 64);
        true
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v || !self.has_edge(u, v) {
            return false;
        }
        self.adj[u * self.words + v / 64] &= !(1 << (v % 64));
        self.adj[v * self.words + u / 64] &= !(1 << (u % 64));
        true
    }

    pub fn degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        bits(self.row(u))
    }

    pub fn common_neighbors(&self, u: usize, v: usize) -> Vec<usize> {
        let both: Vec<u64> = self
            .row(u)
            .iter()
            .zip(self.row(v))
            .map(|(a, b)| a & b)
            .collect();
        bits(&both).collect()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|u| self.degree(u)).sum::<usize>() / 2
    }

    pub fn is_complete(&self) -> bool {
        self.edge_count() == self.n * self.n.saturating_sub(1) / 2
    }

    pub fn is_subgraph_of(&self, other: &SimpleGraph) -> bool {
        self.n == other.n && self.adj.iter().zip(&other.adj).all(|(a, b)| a & !b == 0)
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &a)| vertices[i + 1..].iter().all(|&b| self.has_edge(a, b)))
    }

    /// Non-edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn non_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            ((u + 1)..self.n)
                .filter(move |&v| !self.has_edge(u, v))
                .map(move |v| (u, v))
        })
    }

    /// Serializes as one `u v` line per edge, preceded by a `# n <count>` header
    /// so isolated trailing vertices survive a round trip.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("# n {}\n", self.n);
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}").expect("writing to a String");
        }
        out
    }

    /// Parses the edge-list format. Blank lines and `#` comments are skipped;
    /// the vertex count comes from a `# n <count>` header, else `n`, else the
    /// largest index plus one.
    pub fn parse_edge_list(text: &str, n: Option<usize>) -> Result<Self, PercolationError> {
        let mut declared = n;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if let Some(comment) = line.strip_prefix('#') {
                let mut parts = comment.split_whitespace();
                if parts.next() == Some("n") {
                    if let Some(Ok(count)) = parts.next().map(str::parse::<usize>) {
                        declared.get_or_insert(count);
                    }
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| PercolationError::Parse {
                line: idx + 1,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(parse_err(format!("expected `u v`, found {line:?}")));
            }
            let u = fields[0]
                .parse::<usize>()
                .map_err(|e| parse_err(format!("{:?}: {e}", fields[0])))?;
            let v = fields[1]
                .parse::<usize>()
                .map_err(|e| parse_err(format!("{:?}: {e}", fields[1])))?;
            edges.push((u, v));
        }
        let n =
            declared.unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0));
        Self::from_edges(n, edges)
    }
}

/// Ascending indices of the set bits in a bitset.
pub(crate) fn bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let b = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(i * 64 + b)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_round_trip_keeps_isolated_vertices() {
        let g = SimpleGraph::from_edges(70, [(0, 1), (3, 65), (2, 69)]).unwrap();
        let text = g.to_edge_list();
        assert!(text.ends_with("2 69\n3 65\n"));
        let back = SimpleGraph::parse_edge_list(&text, None).unwrap();
        assert_eq!(back, g);
        let inferred = SimpleGraph::parse_edge_list("0 1\n\n1 4\n", None).unwrap();
        assert_eq!(inferred.n(), 5);
    }

    #[test]
    fn malformed_edge_lists_are_rejected() {
        assert!(matches!(
            SimpleGraph::parse_edge_list("0 1\n2\n", None),
            Err(PercolationError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            SimpleGraph::parse_edge_list("3 3\n", None),
            Err(PercolationError::SelfLoop(3))
        ));
        assert!(matches!(
            SimpleGraph::parse_edge_list("0 9\n", Some(4)),
            Err(PercolationError::VertexOutOfRange { vertex: 9, n: 4 })
        ));
    }

    #[test]
    fn basic_queries() {
        let mut g = SimpleGraph::complete(5);
        assert!(g.is_complete());
        assert_eq!(g.edge_count(), 10);
        assert!(g.remove_edge(1, 3));
        assert!(!g.has_edge(3, 1));
        assert_eq!(g.common_neighbors(1, 3), vec![0, 2, 4]);
        assert_eq!(g.non_edges().collect::<Vec<_>>(), vec![(1, 3)]);
        assert!(!g.is_clique(&[0, 1, 3]));
        assert!(g.is_clique(&[0, 1, 2]));
        assert!(!g.add_edge(2, 2));
    }
}
