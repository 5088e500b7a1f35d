use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{HarnessError, TrialsConfig};
use crate::geometry::{PointConfig, Tolerance};
use crate::reconstruct::{run_pipeline, PipelineOptions, PipelineResult};
use crate::seed::derive_seed;
use crate::sim::{generate, reveal, GeneratorKind, InstanceSpec, RevealPlan};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    pub p: f64,
    /// Known fraction of pairs after the first closure.
    pub fraction_pairs_known_after_closure: f64,
    pub reconstructible_set_fraction: f64,
    pub levels: usize,
    pub inferred_pairs: usize,
    /// Largest deviation of an output squared distance from ground truth.
    pub max_distance_error: f64,
    /// Whether the withheld pair was inferred, when one was withheld.
    pub hidden_pair_inferred: Option<bool>,
    #[serde(skip)]
    pub wall_time: f64,
}

/// Ground truth, reveal rounds and pipeline output of one trial.
pub struct TrialRun {
    pub points: PointConfig,
    pub hidden_pair: Option<(usize, usize)>,
    pub result: PipelineResult,
}

/// Largest `|output - truth|` over every squared distance the pipeline returns.
pub fn max_distance_error(points: &PointConfig, result: &PipelineResult) -> f64 {
    result
        .distances
        .iter()
        .map(|&(i, j, d2)| (d2 - points.squared_distance(i, j)).abs())
        .fold(0.0, f64::max)
}

/// Runs trial `trial` of `cfg` from its own seed stream.
pub fn run_single_trial(
    cfg: &TrialsConfig,
    master_seed: u64,
    trial: usize,
    tol: &Tolerance,
) -> Result<(TrialReport, TrialRun), HarnessError> {
    let start = Instant::now();
    let seed = derive_seed(master_seed, trial as u64);
    let spec = match cfg.instance.generator {
        GeneratorKind::ExplicitPoints { .. } => cfg.instance.clone(),
        _ => InstanceSpec {
            seed: derive_seed(seed, 0),
            ..cfg.instance.clone()
        },
    };
    let points = generate(&spec)?;
    let hidden_pair = spec.hidden_pair().filter(|_| cfg.withhold_hidden_pair);
    let mut plan = RevealPlan::new(cfg.p, cfg.rounds(), derive_seed(seed, 1));
    plan.withheld.extend(hidden_pair);
    let rounds = reveal(&points, &plan)?;
    let opts = PipelineOptions {
        d: spec.d,
        delta: cfg.delta,
        tol: *tol,
    };
    let result = run_pipeline(&rounds, &opts)?;
    let report = TrialReport {
        trial,
        seed,
        n: spec.n,
        d: spec.d,
        p: cfg.p,
        fraction_pairs_known_after_closure: result
            .levels
            .first()
            .map_or(1.0, |l| l.known_fraction_after_closure),
        reconstructible_set_fraction: result.reconstructible_fraction(),
        levels: result.levels.len(),
        inferred_pairs: result.inferred.len(),
        max_distance_error: max_distance_error(&points, &result),
        hidden_pair_inferred: hidden_pair.map(|(u, v)| result.inferred_pair(u, v)),
        wall_time: start.elapsed().as_secs_f64(),
    };
    Ok((
        report,
        TrialRun {
            points,
            hidden_pair,
            result,
        },
    ))
}

/// One report per trial, in trial order regardless of scheduling.
pub fn run_trials(
    cfg: &TrialsConfig,
    master_seed: u64,
    tol: &Tolerance,
) -> Result<Vec<TrialReport>, HarnessError> {
    (0..cfg.count)
        .into_par_iter()
        .map(|t| run_single_trial(cfg, master_seed, t, tol).map(|(report, _)| report))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::trials_csv;

    fn config(generator: GeneratorKind, n: usize, p: f64) -> TrialsConfig {
        TrialsConfig {
            instance: InstanceSpec::new(n, 2, 0, generator),
            p,
            rounds: None,
            delta: 0.1,
            count: 3,
            withhold_hidden_pair: true,
        }
    }

    #[test]
    fn full_reveal_keeps_everything() {
        let cfg = config(
            GeneratorKind::UniformCube {
                general_position: false,
            },
            12,
            1.0,
        );
        let reports = run_trials(&cfg, 5, &Tolerance::default()).unwrap();
        assert_eq!(reports.len(), 3);
        for (t, r) in reports.iter().enumerate() {
            assert_eq!(r.trial, t);
            assert_eq!(r.reconstructible_set_fraction, 1.0);
            assert!(r.max_distance_error < 1e-9);
            assert_eq!(r.hidden_pair_inferred, None);
        }
        let again = run_trials(&cfg, 5, &Tolerance::default()).unwrap();
        assert_eq!(trials_csv(&reports), trials_csv(&again));
    }

    #[test]
    fn withheld_hyperplane_pair_is_flagged() {
        let cfg = config(GeneratorKind::HyperplaneAdversarial, 10, 1.0);
        let reports = run_trials(&cfg, 1, &Tolerance::default()).unwrap();
        assert!(reports
            .iter()
            .all(|r| r.hidden_pair_inferred == Some(false)));
    }
}
