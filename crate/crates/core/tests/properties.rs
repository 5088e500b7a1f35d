mod common;

use proptest::prelude::*;

use common::naive_polluted_closure;
use distance_recon::geometry::{embed_from_distances, PointConfig, Tolerance};
use distance_recon::percolation::{closure, percolates, polluted_closure, sample_gnp, PollutionSet};
use distance_recon::reconstruct::{geometric_closure, DistanceState};
use distance_recon::seed::trial_rng;
use distance_recon::sim::{
    dependent_family_count, find_dense_subspace, generate, reveal, GeneratorKind, InstanceSpec, RevealPlan,
};

fn points(max_n: usize) -> impl Strategy<Value = PointConfig> {
    (1usize..=3, 2..=max_n).prop_flat_map(|(d, n)| {
        prop::collection::vec(prop::collection::vec(-5.0f64..5.0, d), n)
            .prop_map(move |pts| PointConfig::new(d, pts).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn embedding_reproduces_distances(p in points(12)) {
        let m = p.distance_matrix();
        let e = embed_from_distances(&m, p.dim(), &Tolerance::default()).unwrap();
        for i in 0..p.len() {
            for j in 0..p.len() {
                prop_assert!((e.squared_distance(i, j) - m.at(i, j)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn percolation_is_monotone_under_coupling(
        n in 8usize..60,
        a in 0.0f64..1.0,
        b in 0.0f64..1.0,
        seed in any::<u64>(),
        trial in 0u64..1000,
    ) {
        let (lo, hi) = (a.min(b), a.max(b));
        let low = sample_gnp(n, lo, &mut trial_rng(seed, trial));
        let high = sample_gnp(n, hi, &mut trial_rng(seed, trial));
        prop_assert!(low.is_subgraph_of(&high));
        prop_assert!(!percolates(n, lo, 4, seed, trial) || percolates(n, hi, 4, seed, trial));
    }

    #[test]
    fn closure_is_the_rescan_fixed_point(
        n in 4usize..16,
        d in 1usize..=2,
        p in 0.2f64..0.8,
        share in 0.0f64..1.0,
        seed in any::<u64>(),
    ) {
        let mut rng = trial_rng(seed, 0);
        let g = sample_gnp(n, p, &mut rng);
        let members = itertools::Itertools::combinations(0..n, d + 1)
            .filter(|_| rand::Rng::random_bool(&mut rng, share))
            .collect::<Vec<_>>();
        let pollution = PollutionSet::from_members(d, members).unwrap();
        let c = polluted_closure(&g, d, &pollution).unwrap();
        prop_assert!(g.is_subgraph_of(&c));
        prop_assert_eq!(&polluted_closure(&c, d, &pollution).unwrap(), &c);
        prop_assert_eq!(&c, &naive_polluted_closure(&g, d, &pollution));
        let free = closure(&g, d + 3);
        prop_assert!(c.is_subgraph_of(&free));
    }

    #[test]
    fn generic_instances_close_like_plain_percolation(
        n in 6usize..24,
        d in 1usize..=2,
        p in 0.2f64..0.9,
        seed in any::<u64>(),
    ) {
        let tol = Tolerance::exact();
        let spec = InstanceSpec::new(n, d, seed, GeneratorKind::UniformCube { general_position: true });
        let pts = generate(&spec).unwrap();
        prop_assert_eq!(dependent_family_count(&pts, d, &tol).unwrap(), 0);
        let revealed = reveal(&pts, &RevealPlan::new(p, 1, seed)).unwrap().remove(0);
        let plain = closure(revealed.known_graph(), d + 3);
        let (loose, _) = geometric_closure(&revealed, d, &Tolerance::default()).unwrap();
        prop_assert!(loose.known_graph().is_subgraph_of(&plain));
        let (closed, log) = geometric_closure(&revealed, d, &tol).unwrap();
        prop_assert_eq!(closed.known_graph(), &plain);
        let replayed = log.replay(&revealed, d, &tol).unwrap();
        prop_assert_eq!(replayed.known_graph(), closed.known_graph());
        for r in log.final_records() {
            prop_assert!((closed.get(r.u, r.v).unwrap() - pts.squared_distance(r.u, r.v)).abs() < 1e-8);
        }
    }

    #[test]
    fn dense_subspace_members_lie_in_it(
        n in 6usize..16,
        sub in 0usize..2,
        fraction in 0.3f64..1.0,
        seed in any::<u64>(),
    ) {
        let tol = Tolerance::default();
        let kind = GeneratorKind::SubspaceCluster { subspace_dim: sub, fraction };
        let pts = generate(&InstanceSpec::new(n, 2, seed, kind)).unwrap();
        let found = find_dense_subspace(&pts, 0.9, &tol).unwrap();
        prop_assert_eq!(found.basis.len(), found.dim);
        let diameter2 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| pts.squared_distance(i, j))
            .fold(0.0, f64::max);
        for &i in &found.members {
            let mut rest: Vec<f64> = pts.point(i).iter().zip(&found.origin).map(|(a, b)| a - b).collect();
            for b in &found.basis {
                let c: f64 = rest.iter().zip(b).map(|(x, y)| x * y).sum();
                rest.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
            prop_assert!(rest.iter().map(|x| x * x).sum::<f64>() <= 10.0 * tol.eps_rel * diameter2);
        }
        let inside = pts.select(&found.members);
        prop_assert_eq!(dependent_family_count(&inside, found.dim, &tol).unwrap(), found.dependent_families);
        prop_assert!(found.satisfies_bounds() || found.dim == 2);
    }
}

#[test]
fn reveal_marginal_matches_p() {
    let pts = PointConfig::new(1, (0..60).map(|i| vec![i as f64]).collect()).unwrap();
    let pairs = 60 * 59 / 2;
    for p in [0.05, 0.3, 0.7] {
        let seeds = 200;
        let mut revealed = 0usize;
        for seed in 0..seeds {
            let rounds = reveal(&pts, &RevealPlan::new(p, 3, seed)).unwrap();
            let mut union = DistanceState::new(60);
            for r in &rounds {
                for (i, j, d2, prov) in r.pairs() {
                    union.set(i, j, d2, prov);
                }
            }
            revealed += union.known_pairs();
        }
        let total = (pairs * seeds as usize) as f64;
        let sigma = (p * (1.0 - p) / total).sqrt();
        let observed = revealed as f64 / total;
        assert!((observed - p).abs() < 3.0 * sigma, "p = {p}: observed {observed}");
    }
}
