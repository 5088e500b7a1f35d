use rayon::prelude::*;
use serde::Serialize;

use super::{HarnessError, ScanConfig, ScanTarget, TrialsConfig};
use crate::geometry::Tolerance;
use crate::percolation::percolates;
use crate::seed::derive_seed;
use crate::sim::{GeneratorKind, InstanceSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanCell {
    pub n: usize,
    pub p: f64,
    pub trials: usize,
    pub successes: usize,
    pub success_fraction: f64,
    pub stderr: f64,
}

impl ScanCell {
    fn new(n: usize, p: f64, outcomes: &[bool]) -> Self {
        let trials = outcomes.len();
        let successes = outcomes.iter().filter(|&&s| s).count();
        let f = successes as f64 / trials as f64;
        Self {
            n,
            p,
            trials,
            successes,
            success_fraction: f,
            stderr: (f * (1.0 - f) / trials as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub n: usize,
    /// Probability-one-half crossing, or `None` when the curve never
    /// crosses inside the grid.
    pub p_c: Option<f64>,
}

/// Least-squares line `ln p_c = intercept + slope * ln n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub d: usize,
    pub target: ScanTarget,
    pub cells: Vec<ScanCell>,
    pub crossings: Vec<Crossing>,
    pub fit: Option<LogLogFit>,
}

impl ScanResult {
    /// The fit, or the first `n` whose curve is not bracketed.
    pub fn require_fit(&self) -> Result<LogLogFit, HarnessError> {
        if let Some(c) = self.crossings.iter().find(|c| c.p_c.is_none()) {
            return Err(HarnessError::Unbracketed { n: c.n });
        }
        self.fit.ok_or(HarnessError::Unbracketed { n: 0 })
    }

    pub fn curve(&self, n: usize) -> impl Iterator<Item = &ScanCell> {
        self.cells.iter().filter(move |c| c.n == n)
    }
}

/// Crossing of one half, linear in `ln p` between the last grid point below
/// one half and the first at or above it.
pub fn half_crossing(ps: &[f64], fractions: &[f64]) -> Option<f64> {
    let k = fractions.iter().position(|&f| f >= 0.5)?;
    if k == 0 {
        return None;
    }
    let (f0, f1) = (fractions[k - 1], fractions[k]);
    let (l0, l1) = (ps[k - 1].ln(), ps[k].ln());
    Some((l0 + (0.5 - f0) / (f1 - f0) * (l1 - l0)).exp())
}

pub fn fit_log_log(points: &[(f64, f64)]) -> Option<LogLogFit> {
    let m = points.len();
    if m < 2 {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|(n, _)| n.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, p)| p.ln()).collect();
    let mx = xs.iter().sum::<f64>() / m as f64;
    let my = ys.iter().sum::<f64>() / m as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let slope_stderr = if m > 2 {
        (ssr / (m - 2) as f64 / sxx).sqrt()
    } else {
        f64::NAN
    };
    Some(LogLogFit {
        slope,
        slope_stderr,
        intercept,
    })
}

/// Outcome of trial `t` at `(n, p)`. The instance and the per-pair uniforms
/// depend on `(seed, n, t)` only, so outcomes are coupled across `p`.
fn outcome(
    cfg: &ScanConfig,
    seed: u64,
    n: usize,
    p: f64,
    t: usize,
    tol: &Tolerance,
) -> Result<bool, HarnessError> {
    let stream = derive_seed(seed, n as u64);
    match cfg.target {
        ScanTarget::Percolation => Ok(percolates(n, p, cfg.d + 3, stream, t as u64)),
        ScanTarget::Reconstruction => {
            let trials = TrialsConfig {
                instance: InstanceSpec::new(
                    n,
                    cfg.d,
                    0,
                    GeneratorKind::UniformCube {
                        general_position: false,
                    },
                ),
                p,
                rounds: None,
                delta: cfg.delta,
                count: cfg.trials,
                withhold_hidden_pair: false,
            };
            let (report, _) = super::run_single_trial(&trials, stream, t, tol)?;
            Ok(report.reconstructible_set_fraction >= 1.0 - cfg.delta)
        }
    }
}

pub fn scan_threshold(
    cfg: &ScanConfig,
    seed: u64,
    tol: &Tolerance,
) -> Result<ScanResult, HarnessError> {
    let jobs: Vec<(usize, usize, usize)> = (0..cfg.ns.len())
        .flat_map(|a| (0..cfg.ps.len()).flat_map(move |b| (0..cfg.trials).map(move |t| (a, b, t))))
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|&(a, b, t)| outcome(cfg, seed, cfg.ns[a], cfg.ps[b], t, tol))
        .collect::<Result<Vec<bool>, _>>()?;
    let mut cells = Vec::new();
    let mut crossings = Vec::new();
    for (a, per_n) in outcomes.chunks(cfg.ps.len() * cfg.trials).enumerate() {
        let n = cfg.ns[a];
        let row: Vec<ScanCell> = per_n
            .chunks(cfg.trials)
            .zip(&cfg.ps)
            .map(|(o, &p)| ScanCell::new(n, p, o))
            .collect();
        let fractions: Vec<f64> = row.iter().map(|c| c.success_fraction).collect();
        crossings.push(Crossing {
            n,
            p_c: half_crossing(&cfg.ps, &fractions),
        });
        cells.extend(row);
    }
    let bracketed: Vec<(f64, f64)> = crossings
        .iter()
        .filter_map(|c| c.p_c.map(|p| (c.n as f64, p)))
        .collect();
    let fit = if bracketed.len() == crossings.len() {
        fit_log_log(&bracketed)
    } else {
        None
    };
    Ok(ScanResult {
        d: cfg.d,
        target: cfg.target,
        cells,
        crossings,
        fit,
    })
}
