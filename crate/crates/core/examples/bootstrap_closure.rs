//! K_4 bootstrap closure of random graphs, with and without a polluted base.

use distance_recon::percolation::{build_gadget, closure, polluted_closure, sample_gnp, PollutionSet};
use distance_recon::seed::trial_rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 120;
    for p in [0.03, 0.06, 0.12] {
        let g = sample_gnp(n, p, &mut trial_rng(1, 0));
        let c = closure(&g, 4);
        println!(
            "G({n}, {p}): {} edges, closure {} edges, complete: {}",
            g.edge_count(),
            c.edge_count(),
            c.is_complete()
        );
    }

    let gadget = build_gadget(2, 3)?;
    let (u, v) = gadget.root_edge;
    let free = polluted_closure(&gadget.graph, 2, &PollutionSet::new(2))?;
    println!("gadget d = 2, r = 3: root edge recovered: {}", free.has_edge(u, v));
    let blocked = PollutionSet::from_members(2, [gadget.bases[2].clone()])?;
    let cut = polluted_closure(&gadget.graph, 2, &blocked)?;
    println!("with the deepest base polluted: {}", cut.has_edge(u, v));
    Ok(())
}
