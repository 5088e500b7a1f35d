use rand::Rng;
use rayon::prelude::*;

use super::{closure, PercolationError, SimpleGraph};
use crate::seed::trial_rng;

/// Draws one uniform per pair `i < j` in lexicographic order and keeps the
/// edge when it falls below `p`. Feeding the same stream with a larger `p`
/// yields a supergraph, which couples samples across probabilities.
pub fn sample_gnp<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> SimpleGraph {
    let mut g = SimpleGraph::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// Whether `G(n, p)` sampled from trial stream `trial` of `seed` percolates.
pub fn percolates(n: usize, p: f64, clique_size: usize, seed: u64, trial: u64) -> bool {
    let g = sample_gnp(n, p, &mut trial_rng(seed, trial));
    closure(&g, clique_size).is_complete()
}

/// Fraction of `trials` samples of `G(n, p)` whose `K_s`-closure is complete.
/// Trial `t` uses the stream derived from `(seed, t)`, so the estimate is
/// monotone in `p` for a fixed seed.
pub fn estimate_percolation_probability(
    n: usize,
    p: f64,
    clique_size: usize,
    trials: usize,
    seed: u64,
) -> Result<f64, PercolationError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(PercolationError::InvalidProbability(p));
    }
    if trials == 0 {
        return Err(PercolationError::NoTrials);
    }
    if clique_size < 3 {
        return Err(PercolationError::CliqueSize(clique_size));
    }
    let hits = (0..trials as u64)
        .into_par_iter()
        .filter(|&t| percolates(n, p, clique_size, seed, t))
        .count();
    Ok(hits as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_probabilities() {
        assert_eq!(
            estimate_percolation_probability(4, 1.0, 4, 3, 1).unwrap(),
            1.0
        );
        assert_eq!(
            estimate_percolation_probability(60, 0.0, 4, 5, 1).unwrap(),
            0.0
        );
        assert!(estimate_percolation_probability(4, 1.5, 4, 3, 1).is_err());
        assert!(estimate_percolation_probability(4, 0.5, 4, 0, 1).is_err());
    }

    #[test]
    fn coupled_samples_are_nested() {
        for t in 0..20 {
            let lo = sample_gnp(40, 0.1, &mut trial_rng(5, t));
            let hi = sample_gnp(40, 0.2, &mut trial_rng(5, t));
            assert!(lo.is_subgraph_of(&hi));
        }
    }
}
