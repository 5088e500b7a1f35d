use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::geometry::PointConfig;
use crate::reconstruct::{DistanceState, Provenance};
use crate::seed::trial_rng;

/// `k` independent reveal rounds whose union reveals each pair with
/// probability `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RevealPlan {
    pub p: f64,
    pub rounds: usize,
    #[serde(default)]
    pub seed: u64,
    /// Pairs that are never revealed, whatever the draw.
    #[serde(default)]
    pub withheld: Vec<(usize, usize)>,
}

impl RevealPlan {
    pub fn new(p: f64, rounds: usize, seed: u64) -> Self {
        Self {
            p,
            rounds,
            seed,
            withheld: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(SimError::InvalidProbability(self.p));
        }
        if self.rounds < 1 {
            return Err(SimError::InvalidSpec(
                "reveal plan needs at least one round".into(),
            ));
        }
        Ok(())
    }

    /// `p'` with `(1 - p')^k = 1 - p`.
    pub fn per_round_probability(&self) -> f64 {
        1.0 - (1.0 - self.p).powf(1.0 / self.rounds as f64)
    }
}

/// Reveals exact squared distances, one `G(n, p')` draw per round.
pub fn reveal(points: &PointConfig, plan: &RevealPlan) -> Result<Vec<DistanceState>, SimError> {
    plan.validate()?;
    let n = points.len();
    let q = plan.per_round_probability();
    let withheld = |i: usize, j: usize| {
        plan.withheld
            .iter()
            .any(|&(a, b)| (a, b) == (i, j) || (b, a) == (i, j))
    };
    Ok((0..plan.rounds as u64)
        .map(|r| {
            let mut rng = trial_rng(plan.seed, r);
            let mut state = DistanceState::new(n);
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.random::<f64>() < q && !withheld(i, j) {
                        state.set(i, j, points.squared_distance(i, j), Provenance::Revealed);
                    }
                }
            }
            state
        })
        .collect())
}
