use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DistanceState, Provenance, ReconstructError};
use crate::geometry::{BaseFrame, GeometryError, Tolerance};
use crate::percolation::{run_closure, BaseRule};

/// A base is used as soon as its expected error, relative to the squared
/// distances from `u` to the base, is below this.
const ACCURATE: f64 = 1e-12;
/// Independent bases examined per pair before settling for the best one.
const MAX_BASES_PER_PAIR: usize = 64;
/// Greedy base constructions tried per pair during refinement.
const REFINE_STARTS: usize = 4;
/// A refinement pass only uses bases in the lowest of these amplification
/// classes that any open pair can reach.
const AMPLIFICATION_TIERS: [f64; 3] = [1e3, 1e6, f64::INFINITY];

/// One inferred distance: the pair, the base it was read from, the value and
/// the round in which it was set. Refinements re-read an already inferred
/// pair from a better base once closure is complete.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureRecord {
    pub round: usize,
    pub u: usize,
    pub v: usize,
    pub base: Vec<usize>,
    pub dist2: f64,
    #[serde(default)]
    pub refined: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClosureLog {
    pub records: Vec<ClosureRecord>,
    pub refinements: Vec<ClosureRecord>,
}

impl ClosureLog {
    /// Number of inferred pairs.
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Number of closure rounds that added at least one pair.
    pub fn rounds(&self) -> usize {
        self.records.last().map_or(0, |r| r.round + 1)
    }

    /// The last value set for each inferred pair, in inference order.
    pub fn final_records(&self) -> Vec<ClosureRecord> {
        let mut out = self.records.clone();
        let pos: std::collections::HashMap<(usize, usize), usize> = out
            .iter()
            .enumerate()
            .map(|(k, r)| ((r.u, r.v), k))
            .collect();
        for r in &self.refinements {
            if let Some(&k) = pos.get(&(r.u, r.v)) {
                out[k] = r.clone();
            }
        }
        out
    }

    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in self.records.iter().chain(&self.refinements) {
            out.push_str(&serde_json::to_string(r).expect("serializing a closure record"));
            out.push('\n');
        }
        out
    }

    pub fn from_json_lines(text: &str) -> Result<Self, ReconstructError> {
        let all: Vec<ClosureRecord> = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                serde_json::from_str(l)
                    .map_err(|e| ReconstructError::Format(format!("line {}: {e}", i + 1)))
            })
            .collect::<Result<_, _>>()?;
        let (refinements, records) = all.into_iter().partition(|r| r.refined);
        Ok(Self {
            records,
            refinements,
        })
    }

    /// Re-derives every record starting from `start`, a round at a time: all
    /// values of a round are read from the state before that round. Each
    /// base must be fully known and reproduce the logged value exactly.
    pub fn replay(
        &self,
        start: &DistanceState,
        d: usize,
        tol: &Tolerance,
    ) -> Result<DistanceState, ReconstructError> {
        let mut state = start.clone();
        let all: Vec<&ClosureRecord> = self.records.iter().chain(&self.refinements).collect();
        let mut index = 0;
        while index < all.len() {
            let round = (all[index].round, all[index].refined);
            let end = index
                + all[index..]
                    .iter()
                    .take_while(|r| (r.round, r.refined) == round)
                    .count();
            let mut values = Vec::with_capacity(end - index);
            for (k, r) in all[index..end].iter().enumerate() {
                let mismatch = || ReconstructError::ReplayMismatch { index: index + k };
                if r.base.len() != d + 1 || !base_known(&state, r.u, r.v, &r.base) {
                    return Err(mismatch());
                }
                let frame = frame_for(&state, &r.base, tol).ok_or_else(mismatch)?;
                let value = infer_with(&state, &frame, r.u, r.v, &r.base, tol, f64::INFINITY)?;
                if value.to_bits() != r.dist2.to_bits() {
                    return Err(mismatch());
                }
                values.push(value);
            }
            for (r, value) in all[index..end].iter().zip(values) {
                state.set(r.u, r.v, value, Provenance::Inferred);
            }
            index = end;
        }
        Ok(state)
    }
}

fn base_known(s: &DistanceState, u: usize, v: usize, base: &[usize]) -> bool {
    base.iter().enumerate().all(|(i, &a)| {
        s.is_known(a, u) && s.is_known(a, v) && base[i + 1..].iter().all(|&b| s.is_known(a, b))
    })
}

fn frame_for(s: &DistanceState, base: &[usize], tol: &Tolerance) -> Option<BaseFrame> {
    BaseFrame::new(
        base.len(),
        |i, j| s.get(base[i], base[j]).expect("base pair known"),
        tol,
    )
}

fn infer_with(
    s: &DistanceState,
    frame: &BaseFrame,
    u: usize,
    v: usize,
    base: &[usize],
    tol: &Tolerance,
    slack: f64,
) -> Result<f64, ReconstructError> {
    let locate = |x: usize| {
        let to_base: Vec<f64> = base.iter().map(|&t| s.value(x, t)).collect();
        frame.locate(&to_base, tol, slack).map_err(|e| match e {
            GeometryError::InconsistentDistances { residual, .. } => {
                ReconstructError::InconsistencyDetected {
                    u,
                    v,
                    base: base.to_vec(),
                    residual,
                }
            }
            other => other.into(),
        })
    };
    let (xu, xv) = (locate(u)?, locate(v)?);
    let dist2: f64 = xu.iter().zip(&xv).map(|(a, b)| (a - b) * (a - b)).sum();
    // coincident points come out as rounding noise, which would later pass
    // for an independent base
    let scale = base.iter().map(|&t| s.value(u, t).max(s.value(v, t))).fold(0.0, f64::max);
    Ok(if dist2 <= tol.eigen_floor(scale) { 0.0 } else { dist2 })
}

/// Known values with an absolute error estimate per pair.
struct Errors {
    n: usize,
    error: Vec<f64>,
}

impl Errors {
    /// Rounding error of the given values.
    fn new(s: &DistanceState) -> Self {
        let n = s.n();
        let mut error = vec![0.0; n * n];
        for (i, j, d2, _) in s.pairs() {
            error[i * n + j] = 4.0 * f64::EPSILON * d2;
            error[j * n + i] = 4.0 * f64::EPSILON * d2;
        }
        Self { n, error }
    }

    fn get(&self, a: usize, b: usize) -> f64 {
        self.error[a * self.n + b]
    }

    fn set(&mut self, a: usize, b: usize, e: f64) {
        self.error[a * self.n + b] = e;
        self.error[b * self.n + a] = e;
    }

    /// Expected absolute error of `uv` read from `base`.
    fn estimate(
        &self,
        s: &DistanceState,
        u: usize,
        v: usize,
        base: &[usize],
        frame: &BaseFrame,
    ) -> f64 {
        let mut scale = 0.0_f64;
        let mut input = 0.0_f64;
        for (i, &a) in base.iter().enumerate() {
            for &b in base[i + 1..].iter().chain([u, v].iter()) {
                scale = scale.max(s.value(a, b));
                input = input.max(self.get(a, b));
            }
        }
        4.0 * frame.amplification(scale) * (input + f64::EPSILON * scale)
    }
}

/// Accepts a base iff it is independent. A base is used at once when the
/// value it yields is expected to be accurate, otherwise the most accurate
/// of the bases seen is used.
struct GeometricRule<'a> {
    state: &'a mut DistanceState,
    tol: Tolerance,
    round: usize,
    errors: Errors,
    pending: VecDeque<(ClosureRecord, f64)>,
    best: Option<(f64, Vec<usize>, BaseFrame)>,
    seen: usize,
    log: Vec<ClosureRecord>,
}

impl GeometricRule<'_> {
    fn resolve(
        &mut self,
        u: usize,
        v: usize,
        base: Vec<usize>,
        frame: &BaseFrame,
    ) -> Result<bool, ReconstructError> {
        let error = self.errors.estimate(self.state, u, v, &base, frame);
        let dist2 = infer_with(self.state, frame, u, v, &base, &self.tol, error)?;
        self.pending.push_back((
            ClosureRecord {
                round: self.round,
                u,
                v,
                base,
                dist2,
                refined: false,
            },
            error,
        ));
        self.best = None;
        self.seen = 0;
        Ok(true)
    }
}

impl BaseRule for GeometricRule<'_> {
    type Error = ReconstructError;

    fn prune(&mut self, prefix: &[usize], next: usize) -> bool {
        // coincident base points can never be independent
        prefix.iter().any(|&p| self.state.value(p, next) == 0.0)
    }

    fn accept(&mut self, u: usize, v: usize, base: &[usize]) -> Result<bool, ReconstructError> {
        let Some(frame) = frame_for(self.state, base, &self.tol) else {
            return Ok(false);
        };
        let error = self.errors.estimate(self.state, u, v, base, &frame);
        let scale = base
            .iter()
            .map(|&b| self.state.value(u, b))
            .fold(0.0, f64::max);
        if error <= ACCURATE * scale {
            return self.resolve(u, v, base.to_vec(), &frame);
        }
        if self.best.as_ref().is_none_or(|(e, _, _)| error < *e) {
            self.best = Some((error, base.to_vec(), frame));
        }
        self.seen += 1;
        if self.seen >= MAX_BASES_PER_PAIR {
            return self.finish(u, v);
        }
        Ok(false)
    }

    fn finish(&mut self, u: usize, v: usize) -> Result<bool, ReconstructError> {
        self.seen = 0;
        match self.best.take() {
            Some((_, base, frame)) => self.resolve(u, v, base, &frame),
            None => Ok(false),
        }
    }

    fn commit(&mut self, u: usize, v: usize) {
        if self
            .pending
            .front()
            .is_some_and(|(r, _)| r.u == u && r.v == v)
        {
            let (r, error) = self.pending.pop_front().expect("front checked");
            self.state.set(u, v, r.dist2, Provenance::Inferred);
            self.errors.set(u, v, error);
            self.log.push(r);
        }
        if self.pending.is_empty() {
            self.round += 1;
        }
    }
}

/// Builds a base greedily from pairs accepted by `good`: start at `start`,
/// then repeatedly add the candidate farthest from the current span.
fn greedy_base(
    s: &DistanceState,
    good: impl Fn(usize, usize) -> bool,
    candidates: &[usize],
    start: usize,
    d: usize,
    tol: &Tolerance,
) -> Option<(Vec<usize>, BaseFrame)> {
    let mut chosen = vec![start];
    while chosen.len() <= d {
        let frame = frame_for(s, &chosen, tol)?;
        let next = candidates
            .iter()
            .filter(|&&w| !chosen.contains(&w) && chosen.iter().all(|&c| good(w, c)))
            .map(|&w| {
                let to: Vec<f64> = chosen.iter().map(|&c| s.value(w, c)).collect();
                (frame.height2(&to), w)
            })
            .max_by(|a, b| a.0.total_cmp(&b.0))?;
        if next.0 <= 0.0 {
            return None;
        }
        chosen.push(next.1);
    }
    let frame = frame_for(s, &chosen, tol)?;
    Some((chosen, frame))
}

/// Re-reads inferred pairs from well conditioned bases, shallowest first:
/// pass `k` only uses given pairs and pairs settled in earlier passes, so
/// every settled value is at most `k` inferences away from the input.
fn refine(
    state: &mut DistanceState,
    records: &[ClosureRecord],
    d: usize,
    tol: &Tolerance,
) -> Result<Vec<ClosureRecord>, ReconstructError> {
    let n = state.n();
    let mut settled = vec![false; n * n];
    for (i, j, _, _) in state.pairs() {
        settled[i * n + j] = true;
        settled[j * n + i] = true;
    }
    for r in records {
        settled[r.u * n + r.v] = false;
        settled[r.v * n + r.u] = false;
    }
    let first_round = records.last().map_or(0, |r| r.round + 1);
    let mut out = Vec::new();
    for pass in 0.. {
        let open: Vec<(usize, usize)> = records
            .iter()
            .filter(|r| !settled[r.u * n + r.v])
            .map(|r| (r.u, r.v))
            .collect();
        let frozen: &DistanceState = state;
        let good = |a: usize, b: usize| settled[a * n + b];
        let found = open
            .par_iter()
            .map(|&(u, v)| {
                let candidates: Vec<usize> = (0..n)
                    .filter(|&w| w != u && w != v && good(u, w) && good(v, w))
                    .collect();
                if candidates.len() <= d {
                    return Ok(None);
                }
                let starts = REFINE_STARTS.min(candidates.len());
                let best = (0..starts)
                    .map(|k| candidates[k * candidates.len() / starts])
                    .filter_map(|w| greedy_base(frozen, good, &candidates, w, d, tol))
                    .map(|(base, frame)| {
                        let scale = base
                            .iter()
                            .map(|&b| frozen.value(u, b).max(frozen.value(v, b)))
                            .fold(0.0, f64::max);
                        (frame.amplification(scale), base, frame)
                    })
                    .min_by(|a, b| a.0.total_cmp(&b.0));
                Ok(best.map(|(amp, base, frame)| (u, v, amp, base, frame)))
            })
            .collect::<Result<Vec<_>, ReconstructError>>()?;
        let found: Vec<_> = found.into_iter().flatten().collect();
        let Some(limit) = AMPLIFICATION_TIERS
            .into_iter()
            .find(|&t| found.iter().any(|(_, _, amp, _, _)| *amp <= t))
        else {
            break;
        };
        let mut settle = Vec::new();
        for (u, v, _, base, frame) in found.into_iter().filter(|f| f.2 <= limit) {
            // consistency was checked when the pair was first inferred
            let dist2 = infer_with(frozen, &frame, u, v, &base, tol, f64::INFINITY)?;
            settle.push(ClosureRecord {
                round: first_round + pass,
                u,
                v,
                base,
                dist2,
                refined: true,
            });
        }
        for r in settle {
            state.set(r.u, r.v, r.dist2, Provenance::Inferred);
            settled[r.u * n + r.v] = true;
            settled[r.v * n + r.u] = true;
            out.push(r);
        }
    }
    Ok(out)
}

/// Fixed point of inferring `uv` from any independent `(d+1)`-base whose
/// distances to `u`, to `v` and among themselves are known.
pub fn geometric_closure(
    s: &DistanceState,
    d: usize,
    tol: &Tolerance,
) -> Result<(DistanceState, ClosureLog), ReconstructError> {
    let mut state = s.clone();
    let mut graph = state.known_graph().clone();
    let mut rule = GeometricRule {
        state: &mut state,
        tol: *tol,
        round: 0,
        errors: Errors::new(s),
        pending: VecDeque::new(),
        best: None,
        seen: 0,
        log: Vec::new(),
    };
    run_closure(&mut graph, d + 1, &mut rule)?;
    let records = std::mem::take(&mut rule.log);
    let refinements = refine(&mut state, &records, d, tol)?;
    Ok((
        state,
        ClosureLog {
            records,
            refinements,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PointConfig;

    fn state(points: &[[f64; 2]], hidden: &[(usize, usize)]) -> (PointConfig, DistanceState) {
        let p = PointConfig::new(2, points.iter().map(|x| x.to_vec()).collect()).unwrap();
        let n = p.len();
        let pairs = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !hidden.contains(&(i, j)))
            .map(|(i, j)| (i, j, p.squared_distance(i, j)))
            .collect::<Vec<_>>();
        (p.clone(), DistanceState::from_pairs(n, pairs).unwrap())
    }

    const GENERIC: [[f64; 2]; 6] = [
        [0.1, 0.2],
        [0.9, 0.15],
        [0.4, 0.8],
        [0.7, 0.6],
        [0.25, 0.55],
        [0.6, 0.3],
    ];

    #[test]
    fn hidden_pair_is_read_from_a_base() {
        let (p, s) = state(&GENERIC[..5], &[(1, 3)]);
        let (closed, log) = geometric_closure(&s, 2, &Tolerance::default()).unwrap();
        assert_eq!(log.len(), 1);
        assert!((closed.get(1, 3).unwrap() - p.squared_distance(1, 3)).abs() < 1e-12);
        assert_eq!(closed.provenance(1, 3), Some(Provenance::Inferred));
        assert_eq!(log.records[0].base.len(), 3);
    }

    #[test]
    fn too_few_points_infer_nothing() {
        let (_, s) = state(&GENERIC[..4], &[(0, 3)]);
        let (closed, log) = geometric_closure(&s, 2, &Tolerance::default()).unwrap();
        assert!(log.is_empty());
        assert!(!closed.is_known(0, 3));
    }

    #[test]
    fn pair_off_a_line_stays_unknown() {
        // every base includes at most one of the two off-line points
        let mut points: Vec<[f64; 2]> = (0..6).map(|i| [0.1 * i as f64, 0.0]).collect();
        points.extend([[0.2, 0.5], [0.7, 0.9]]);
        let (_, s) = state(&points, &[(6, 7)]);
        let (closed, log) = geometric_closure(&s, 2, &Tolerance::default()).unwrap();
        assert!(log.is_empty());
        assert!(!closed.is_known(6, 7));
    }

    #[test]
    fn log_replays_and_round_trips() {
        let hidden = [(0, 5), (1, 3), (2, 5)];
        let (p, s) = state(&GENERIC, &hidden);
        let tol = Tolerance::default();
        let (closed, log) = geometric_closure(&s, 2, &tol).unwrap();
        assert_eq!(log.len(), 3);
        for &(u, v) in &hidden {
            assert!((closed.get(u, v).unwrap() - p.squared_distance(u, v)).abs() < 1e-12);
        }
        let parsed = ClosureLog::from_json_lines(&log.to_json_lines()).unwrap();
        assert_eq!(parsed, log);
        let replayed = parsed.replay(&s, 2, &tol).unwrap();
        for &(u, v) in &hidden {
            assert_eq!(replayed.get(u, v), closed.get(u, v));
        }
        let mut tampered = log.clone();
        tampered.records[0].dist2 += 1e-3;
        assert!(matches!(
            tampered.replay(&s, 2, &tol),
            Err(ReconstructError::ReplayMismatch { .. })
        ));
    }

    #[test]
    fn inconsistent_distances_are_detected() {
        let (_, mut s) = state(&GENERIC[..5], &[(1, 3)]);
        s.set(0, 1, 0.9, Provenance::Revealed);
        assert!(matches!(
            geometric_closure(&s, 2, &Tolerance::default()),
            Err(ReconstructError::InconsistencyDetected { u: 1, v: 3, .. })
        ));
    }
}
