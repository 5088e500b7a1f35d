use serde::Serialize;

use super::{PercolationError, SimpleGraph};

/// A chain of `r` copies of `K_{d+3}` glued along removed edges.
///
/// Copy `i` lives on `{u_i, v_i}` plus `d + 1` fresh vertices, the first two
/// of which are `u_{i+1}, v_{i+1}`. The edge `u_i v_i` is missing from copies
/// `i - 1` and `i`; the root `u_1 v_1 = (0, 1)` is missing outright.
#[derive(Debug, Clone, Serialize)]
pub struct GadgetDescriptor {
    pub d: usize,
    pub r: usize,
    #[serde(serialize_with = "serialize_edges")]
    pub graph: SimpleGraph,
    pub root_edge: (usize, usize),
    /// Base of copy `i`: its vertices other than `u_i, v_i`, in chain order.
    pub bases: Vec<Vec<usize>>,
}

fn serialize_edges<S: serde::Serializer>(g: &SimpleGraph, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("SimpleGraph", 2)?;
    st.serialize_field("n", &g.n())?;
    st.serialize_field("edges", &g.edges().collect::<Vec<_>>())?;
    st.end()
}

pub fn build_gadget(d: usize, r: usize) -> Result<GadgetDescriptor, PercolationError> {
    if d < 1 || r < 1 {
        return Err(PercolationError::InvalidGadget { d, r });
    }
    let n = r * (d + 1) + 2;
    let mut graph = SimpleGraph::empty(n);
    let mut bases = Vec::with_capacity(r);
    let (mut u, mut v) = (0, 1);
    for i in 0..r {
        let start = 2 + i * (d + 1);
        let base: Vec<usize> = (start..start + d + 1).collect();
        let mut copy = vec![u, v];
        copy.extend(&base);
        for (a, &x) in copy.iter().enumerate() {
            for &y in &copy[a + 1..] {
                graph.add_edge(x, y);
            }
        }
        graph.remove_edge(u, v);
        if i + 1 < r {
            graph.remove_edge(base[0], base[1]);
        }
        (u, v) = (base[0], base[1]);
        bases.push(base);
    }
    Ok(GadgetDescriptor {
        d,
        r,
        graph,
        root_edge: (0, 1),
        bases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom2(k: usize) -> usize {
        k * (k - 1) / 2
    }

    #[test]
    fn counts_match_the_chain_formula() {
        for d in 1..=4 {
            for r in 1..=6 {
                let g = build_gadget(d, r).unwrap();
                assert_eq!(g.graph.n(), r * (d + 1) + 2);
                assert_eq!(g.graph.edge_count(), r * (binom2(d + 3) - 2) + 1);
                assert!(!g.graph.has_edge(0, 1));
                assert_eq!(g.bases.len(), r);
                assert!(g.bases.iter().all(|b| b.len() == d + 1));
            }
        }
    }

    #[test]
    fn small_gadgets() {
        let k4 = build_gadget(1, 1).unwrap();
        assert_eq!((k4.graph.n(), k4.graph.edge_count()), (4, 5));
        let chain = build_gadget(1, 3).unwrap();
        assert_eq!((chain.graph.n(), chain.graph.edge_count()), (8, 13));
        assert_eq!(build_gadget(3, 3).unwrap().graph.n(), 14);
        assert!(build_gadget(0, 2).is_err());
        assert!(build_gadget(2, 0).is_err());
    }

    #[test]
    fn consecutive_removed_edges_are_disjoint() {
        let g = build_gadget(2, 4).unwrap();
        let mut removed = vec![g.root_edge];
        removed.extend(g.bases[..3].iter().map(|b| (b[0], b[1])));
        for w in removed.windows(2) {
            let (a, b) = (w[0], w[1]);
            assert!(a.0 != b.0 && a.0 != b.1 && a.1 != b.0 && a.1 != b.1);
            assert!(!g.graph.has_edge(b.0, b.1));
        }
    }

    #[test]
    fn json_lists_edges() {
        let g = build_gadget(1, 1).unwrap();
        let json = serde_json::to_value(&g).unwrap();
        assert_eq!(json["graph"]["n"], 4);
        assert_eq!(json["graph"]["edges"].as_array().unwrap().len(), 5);
        assert_eq!(json["root_edge"], serde_json::json!([0, 1]));
    }
}
