use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    extract_reconstructible_clique, geometric_closure, merge_duplicates, recover_projection,
    reduce_dimension, share_component_distances, AnchorEmbedding, ClosureRecord, DistanceState,
    Projection, ProjectionMap, Provenance, ReconstructError, ReductionStep,
};
use crate::geometry::{
    embed_from_distances, embed_with_spectrum, PointConfig, SquaredDistanceMatrix, Tolerance,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineOptions {
    pub d: usize,
    /// Fraction of points the anchor clique may miss.
    pub delta: f64,
    #[serde(default)]
    pub tol: Tolerance,
}

/// What happened at one level of the pipeline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSummary {
    pub level: usize,
    pub dim: usize,
    pub points: usize,
    pub revealed_pairs_ingested: usize,
    pub merged_pairs: usize,
    pub inferred_pairs: usize,
    pub closure_rounds: usize,
    pub known_fraction_after_closure: f64,
    pub anchor_size: usize,
    pub subspace_dim: Option<usize>,
    pub covered: usize,
}

/// A closure inference in original point indices, after refinement; `dist2`
/// is the value at that level, i.e. after subtracting earlier reduction
/// constants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InferredDistance {
    pub level: usize,
    #[serde(flatten)]
    pub record: ClosureRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineResult {
    pub n: usize,
    pub d: usize,
    /// Surviving points, sorted.
    pub indices: Vec<usize>,
    /// Every pair of surviving points, `(i, j, dist2)` with `i < j`.
    pub distances: Vec<(usize, usize, f64)>,
    /// Coordinates of the surviving points, in the order of `indices`.
    pub embedding: PointConfig,
    pub steps: Vec<ReductionStep>,
    pub levels: Vec<LevelSummary>,
    pub inferred: Vec<InferredDistance>,
}

impl PipelineResult {
    pub fn reconstructible_fraction(&self) -> f64 {
        if self.n == 0 {
            1.0
        } else {
            self.indices.len() as f64 / self.n as f64
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// Whether closure inferred `uv` at any level.
    pub fn inferred_pair(&self, u: usize, v: usize) -> bool {
        let (u, v) = (u.min(v), u.max(v));
        self.inferred
            .iter()
            .any(|r| r.record.u == u && r.record.v == v)
    }

    /// Whether the output fixes the distance `uv`, by inference or by keeping
    /// both endpoints.
    pub fn determines_pair(&self, u: usize, v: usize) -> bool {
        self.inferred_pair(u, v) || (self.contains(u) && self.contains(v))
    }

    /// Squared distances among the surviving points, in `indices` order.
    pub fn distance_matrix(&self) -> SquaredDistanceMatrix {
        let mut m = SquaredDistanceMatrix::unknown(self.indices.len());
        let pos = |i: usize| self.indices.binary_search(&i).expect("surviving index");
        for &(i, j, d2) in &self.distances {
            m.set(pos(i), pos(j), d2);
        }
        m
    }
}

/// Level-local view: which original points are alive, the current squared
/// distances among them and the reduction constants accumulated so far.
struct Levels<'a> {
    rounds: &'a [DistanceState],
    tol: Tolerance,
    n: usize,
    ids: Vec<usize>,
    slot: Vec<Option<usize>>,
    offset: Vec<f64>,
    state: DistanceState,
}

impl Levels<'_> {
    /// Adds round `r` (if supplied) to the current state, shifted by the
    /// accumulated constants. Returns the number of new pairs.
    fn ingest(&mut self, r: usize) -> Result<usize, ReconstructError> {
        let Some(round) = self.rounds.get(r) else {
            return Ok(0);
        };
        let mut added = 0;
        let scale = self.state.scale();
        for (i, j, d2, _) in round.pairs() {
            let (Some(a), Some(b)) = (self.slot[i], self.slot[j]) else {
                continue;
            };
            if self.state.is_known(a, b) {
                continue;
            }
            let value = d2 - self.offset[i * self.n + j];
            if value < -self.tol.residual_floor(scale.max(d2)) {
                return Err(ReconstructError::NegativeResidual { i, j, value });
            }
            self.state.set(a, b, value.max(0.0), Provenance::Revealed);
            added += 1;
        }
        Ok(added)
    }

    fn keep(
        &mut self,
        survivors: &[usize],
        constants: &[(usize, usize, f64)],
        next: DistanceState,
    ) {
        for &(a, b, c) in constants {
            let (i, j) = (self.ids[a], self.ids[b]);
            self.offset[i * self.n + j] += c;
            self.offset[j * self.n + i] += c;
        }
        self.ids = survivors.iter().map(|&a| self.ids[a]).collect();
        self.slot = vec![None; self.n];
        for (a, &i) in self.ids.iter().enumerate() {
            self.slot[i] = Some(a);
        }
        self.state = next;
    }

    /// Assembles full squared distances for `members` (state indices); when
    /// `flat` the remaining dimension is 0 and every current value is 0.
    fn assemble(&self, members: &[usize], flat: bool) -> (Vec<usize>, Vec<(usize, usize, f64)>) {
        let mut pairs: Vec<(usize, usize)> = members.iter().map(|&a| (self.ids[a], a)).collect();
        pairs.sort_unstable();
        let mut distances = Vec::new();
        for (k, &(i, a)) in pairs.iter().enumerate() {
            for &(j, b) in &pairs[k + 1..] {
                let here = if flat {
                    0.0
                } else {
                    self.state.get(a, b).expect("final set is a clique")
                };
                distances.push((i, j, self.offset[i * self.n + j] + here));
            }
        }
        (pairs.into_iter().map(|(i, _)| i).collect(), distances)
    }
}

/// Reconstructs as many points as possible from sprinkled reveal rounds.
///
/// Level `l` ingests round `3l` before closing, `3l + 1` before projecting
/// and `3l + 2` before reducing; missing rounds are skipped. Each level
/// closes the known distances, embeds an anchor clique, projects the other
/// points onto its span and subtracts the in-span part of every distance.
/// The run ends when the anchor covers every live point, when the remaining
/// dimension reaches 0, or when the anchor spans no direction.
pub fn run_pipeline(
    rounds: &[DistanceState],
    opts: &PipelineOptions,
) -> Result<PipelineResult, ReconstructError> {
    let n = rounds.first().map_or(0, DistanceState::n);
    if let Some(bad) = rounds.iter().find(|r| r.n() != n) {
        return Err(ReconstructError::RoundSize {
            expected: n,
            got: bad.n(),
        });
    }
    if !(opts.delta > 0.0 && opts.delta < 1.0) {
        return Err(ReconstructError::InvalidDelta(opts.delta));
    }
    let tol = opts.tol;
    let mut lv = Levels {
        rounds,
        tol,
        n,
        ids: (0..n).collect(),
        slot: (0..n).map(Some).collect(),
        offset: vec![0.0; n * n],
        state: DistanceState::new(n),
    };
    let mut dim = opts.d;
    let mut steps = Vec::new();
    let mut levels = Vec::new();
    let mut inferred = Vec::new();

    let mut level = 0;
    let (indices, distances) = loop {
        let mut ingested = lv.ingest(3 * level)?;
        let parts = merge_duplicates(&lv.state, &tol)?;
        let merged = share_component_distances(&mut lv.state, &parts);
        let (closed, log) = geometric_closure(&lv.state, dim, &tol)?;
        lv.state = closed;
        let mut summary = LevelSummary {
            level,
            dim,
            points: lv.ids.len(),
            revealed_pairs_ingested: ingested,
            merged_pairs: merged,
            inferred_pairs: log.len(),
            closure_rounds: log.rounds(),
            known_fraction_after_closure: lv.state.known_fraction(),
            anchor_size: 0,
            subspace_dim: None,
            covered: 0,
        };
        inferred.extend(log.final_records().into_iter().map(|r| {
            let (u, v) = (lv.ids[r.u], lv.ids[r.v]);
            InferredDistance {
                level,
                record: ClosureRecord {
                    u: u.min(v),
                    v: u.max(v),
                    base: r.base.iter().map(|&t| lv.ids[t]).collect(),
                    ..r
                },
            }
        }));

        let anchor = extract_reconstructible_clique(&lv.state, opts.delta)?;
        summary.anchor_size = anchor.len();
        if anchor.len() == lv.ids.len() {
            levels.push(summary);
            break lv.assemble(&anchor, false);
        }
        let spectrum = embed_with_spectrum(&lv.state.restrict(&anchor).to_matrix(), dim, &tol)?;
        let dprime = spectrum.rank;
        summary.subspace_dim = Some(dprime);
        if dprime == 0 {
            levels.push(summary);
            break lv.assemble(&anchor, false);
        }
        let coords: Vec<Vec<f64>> = spectrum
            .points
            .points()
            .iter()
            .map(|p| p[..dprime].to_vec())
            .collect();
        let embedded =
            AnchorEmbedding::new(anchor.clone(), PointConfig::new(dprime, coords.clone())?)?;

        ingested += lv.ingest(3 * level + 1)?;
        let mut proj: ProjectionMap = anchor
            .iter()
            .zip(&coords)
            .map(|(&a, y)| (a, (y.clone(), 0.0)))
            .collect();
        let state = &lv.state;
        let outside: Vec<usize> = (0..lv.ids.len())
            .filter(|a| anchor.binary_search(a).is_err())
            .collect();
        let found = outside
            .par_iter()
            .map(|&v| recover_projection(&embedded, state, v, &tol).map(|p| (v, p)))
            .collect::<Result<Vec<_>, _>>()?;
        for (v, p) in found {
            if let Projection::Covered {
                point, residual, ..
            } = p
            {
                proj.insert(v, (point, residual));
            }
        }
        let survivors: Vec<usize> = proj.keys().copied().collect();
        summary.covered = survivors.len() - anchor.len();

        ingested += lv.ingest(3 * level + 2)?;
        summary.revealed_pairs_ingested = ingested;
        let (constants, next) = reduce_dimension(&lv.state, &proj, &survivors, &tol)?;
        steps.push(ReductionStep {
            level,
            surviving: survivors.iter().map(|&a| lv.ids[a]).collect(),
            subspace_dim: dprime,
            anchor: anchor.iter().map(|&a| lv.ids[a]).collect(),
            anchor_coords: coords,
            constants: constants
                .iter()
                .map(|&(a, b, c)| (lv.ids[a], lv.ids[b], c))
                .collect(),
        });
        levels.push(summary);
        lv.keep(&survivors, &constants, next);
        dim -= dprime;
        if dim == 0 {
            let all: Vec<usize> = (0..lv.ids.len()).collect();
            break lv.assemble(&all, true);
        }
        level += 1;
    };

    let mut result = PipelineResult {
        n,
        d: opts.d,
        indices,
        distances,
        embedding: PointConfig::empty(opts.d),
        steps,
        levels,
        inferred,
    };
    result.embedding = embed_from_distances(&result.distance_matrix(), opts.d, &tol)?;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(d: usize) -> PipelineOptions {
        PipelineOptions {
            d,
            delta: 0.1,
            tol: Tolerance::default(),
        }
    }

    fn cloud() -> PointConfig {
        PointConfig::new(
            2,
            vec![
                vec![0.1, 0.2],
                vec![0.9, 0.15],
                vec![0.4, 0.8],
                vec![0.7, 0.6],
                vec![0.25, 0.55],
                vec![0.6, 0.3],
            ],
        )
        .unwrap()
    }

    #[test]
    fn fully_revealed_configuration_is_kept_whole() {
        let p = cloud();
        let rounds = [DistanceState::from_matrix(&p.distance_matrix())];
        let result = run_pipeline(&rounds, &opts(2)).unwrap();
        assert_eq!(result.indices, (0..6).collect::<Vec<_>>());
        assert!(result.inferred.is_empty());
        let m = result.distance_matrix();
        let e = &result.embedding;
        for i in 0..6 {
            for j in 0..6 {
                assert!((m.get(i, j).unwrap() - p.squared_distance(i, j)).abs() < 1e-12);
                assert!((e.squared_distance(i, j) - p.squared_distance(i, j)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn hidden_pair_is_inferred_in_the_first_level() {
        let p = cloud();
        let all = DistanceState::from_matrix(&p.distance_matrix());
        let s = DistanceState::from_pairs(
            6,
            all.pairs()
                .filter(|&(i, j, _, _)| (i, j) != (1, 3))
                .map(|(i, j, d2, _)| (i, j, d2)),
        )
        .unwrap();
        let result = run_pipeline(&[s], &opts(2)).unwrap();
        assert_eq!(result.reconstructible_fraction(), 1.0);
        assert!(result.inferred_pair(3, 1));
        assert_eq!(result.inferred[0].level, 0);
        assert!((result.inferred[0].record.dist2 - p.squared_distance(1, 3)).abs() < 1e-12);
    }

    #[test]
    fn repeated_point_is_reconstructed() {
        let mut points = cloud().points().to_vec();
        points.push(points[2].clone());
        let p = PointConfig::new(2, points).unwrap();
        let rounds = [DistanceState::from_matrix(&p.distance_matrix())];
        let result = run_pipeline(&rounds, &opts(2)).unwrap();
        assert_eq!(result.indices.len(), 7);
        let m = result.distance_matrix();
        assert_eq!(m.get(2, 6), Some(0.0));
    }

    #[test]
    fn rejects_bad_options() {
        let rounds = [DistanceState::new(4), DistanceState::new(5)];
        assert!(matches!(
            run_pipeline(&rounds, &opts(2)),
            Err(ReconstructError::RoundSize { .. })
        ));
        let bad = PipelineOptions {
            delta: 1.0,
            ..opts(2)
        };
        assert!(matches!(
            run_pipeline(&rounds[..1], &bad),
            Err(ReconstructError::InvalidDelta(_))
        ));
    }
}
