use itertools::Itertools;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::geometry::{affine_dimension, PointConfig, Tolerance};
use crate::seed::trial_rng;

/// Largest `C(n, d+1)` for which general position is certified.
const GENERAL_POSITION_LIMIT: u128 = 10_000_000;
/// Simplices whose float volume exceeds this fraction of the product of
/// their edge lengths are independent whatever the rounding; the rest are
/// decided exactly.
const VOLUME_FILTER: f64 = 1e-6;
const GENERAL_POSITION_ATTEMPTS: u64 = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorKind {
    /// I.i.d. uniform in `[0, 1]^d`, optionally resampled until every
    /// `(d+1)`-subset is independent under exact arithmetic.
    UniformCube {
        #[serde(default)]
        general_position: bool,
    },
    /// `n - 2` points uniform on the hyperplane `x_d = 0` and the last two
    /// points strictly above it.
    HyperplaneAdversarial,
    /// A `fraction` of the points uniform on the `subspace_dim`-dimensional
    /// coordinate subspace, the rest uniform in the cube.
    SubspaceCluster {
        subspace_dim: usize,
        fraction: f64,
    },
    /// Uniform atoms, each repeated with the given multiplicity.
    MultisetAtoms {
        multiplicities: Vec<usize>,
    },
    /// Integer coordinates uniform in `[-side, side]^d`.
    Lattice {
        side: u32,
    },
    ExplicitPoints {
        points: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub n: usize,
    pub d: usize,
    #[serde(default)]
    pub seed: u64,
    pub generator: GeneratorKind,
}

impl InstanceSpec {
    pub fn new(n: usize, d: usize, seed: u64, generator: GeneratorKind) -> Self {
        Self {
            n,
            d,
            seed,
            generator,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::InvalidSpec(msg));
        if self.n < 1 || self.d < 1 {
            return bad(format!(
                "need n >= 1 and d >= 1, got n = {}, d = {}",
                self.n, self.d
            ));
        }
        match &self.generator {
            GeneratorKind::UniformCube { .. } | GeneratorKind::Lattice { .. } => Ok(()),
            GeneratorKind::HyperplaneAdversarial if self.n < 2 => {
                bad("hyperplane family needs n >= 2".into())
            }
            GeneratorKind::HyperplaneAdversarial => Ok(()),
            GeneratorKind::SubspaceCluster {
                subspace_dim,
                fraction,
            } => {
                if *subspace_dim > self.d {
                    bad(format!(
                        "subspace_dim {subspace_dim} exceeds d = {}",
                        self.d
                    ))
                } else if !(0.0..=1.0).contains(fraction) {
                    bad(format!("fraction {fraction} outside [0, 1]"))
                } else {
                    Ok(())
                }
            }
            GeneratorKind::MultisetAtoms { multiplicities } => {
                let total: usize = multiplicities.iter().sum();
                if total != self.n || multiplicities.contains(&0) {
                    bad(format!(
                        "positive multiplicities must sum to n = {}, got {multiplicities:?}",
                        self.n
                    ))
                } else {
                    Ok(())
                }
            }
            GeneratorKind::ExplicitPoints { points } => {
                if points.len() != self.n || points.iter().any(|p| p.len() != self.d) {
                    bad(format!(
                        "explicit points must be {} vectors of length {}",
                        self.n, self.d
                    ))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// The pair whose distance the hyperplane family makes ambiguous.
    pub fn hidden_pair(&self) -> Option<(usize, usize)> {
        match self.generator {
            GeneratorKind::HyperplaneAdversarial => Some((self.n - 2, self.n - 1)),
            _ => None,
        }
    }
}

fn cube_point(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.random::<f64>()).collect()
}

/// Builds the configuration described by `spec`; the output depends only on
/// the spec, seed included.
pub fn generate(spec: &InstanceSpec) -> Result<PointConfig, SimError> {
    spec.validate()?;
    let (n, d) = (spec.n, spec.d);
    let mut rng = trial_rng(spec.seed, 0);
    let points: Vec<Vec<f64>> = match &spec.generator {
        GeneratorKind::UniformCube {
            general_position: false,
        } => (0..n).map(|_| cube_point(&mut rng, d)).collect(),
        GeneratorKind::UniformCube {
            general_position: true,
        } => return general_position_cube(spec),
        GeneratorKind::HyperplaneAdversarial => (0..n)
            .map(|i| {
                let mut p = cube_point(&mut rng, d);
                p[d - 1] = if i < n - 2 {
                    0.0
                } else {
                    0.25 + 0.75 * p[d - 1]
                };
                p
            })
            .collect(),
        GeneratorKind::SubspaceCluster {
            subspace_dim,
            fraction,
        } => {
            let inside = (fraction * n as f64).round() as usize;
            (0..n)
                .map(|i| {
                    let mut p = cube_point(&mut rng, d);
                    if i < inside {
                        p[*subspace_dim..].iter_mut().for_each(|x| *x = 0.0);
                    }
                    p
                })
                .collect()
        }
        GeneratorKind::MultisetAtoms { multiplicities } => multiplicities
            .iter()
            .flat_map(|&m| {
                let atom = cube_point(&mut rng, d);
                std::iter::repeat_n(atom, m)
            })
            .collect(),
        GeneratorKind::Lattice { side } => {
            let s = *side as i64;
            (0..n)
                .map(|_| (0..d).map(|_| rng.random_range(-s..=s) as f64).collect())
                .collect()
        }
        GeneratorKind::ExplicitPoints { points } => points.clone(),
    };
    Ok(PointConfig::new(d, points)?)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn clearly_independent(p: &PointConfig, subset: &[usize]) -> bool {
    let k = subset.len() - 1;
    if k != p.dim() {
        return false;
    }
    let origin = p.point(subset[0]);
    let m = nalgebra::DMatrix::from_fn(k, k, |i, j| p.point(subset[i + 1])[j] - origin[j]);
    let lengths: f64 = m.row_iter().map(|r| r.norm()).product();
    m.determinant().abs() > VOLUME_FILTER * lengths
}

fn general_position_cube(spec: &InstanceSpec) -> Result<PointConfig, SimError> {
    let (n, d) = (spec.n, spec.d);
    let families = binomial(n, d + 1);
    if families > GENERAL_POSITION_LIMIT {
        return Err(SimError::TooLarge {
            count: families,
            limit: GENERAL_POSITION_LIMIT,
        });
    }
    let exact = Tolerance::exact();
    for attempt in 0..GENERAL_POSITION_ATTEMPTS {
        let mut rng = trial_rng(spec.seed, attempt);
        let points: Vec<Vec<f64>> = (0..n).map(|_| cube_point(&mut rng, d)).collect();
        let config = PointConfig::new(d, points)?;
        let mut generic = true;
        for subset in (0..n).combinations((d + 1).min(n)) {
            if clearly_independent(&config, &subset) {
                continue;
            }
            if affine_dimension(&config.select(&subset), &exact)? < subset.len() - 1 {
                generic = false;
                break;
            }
        }
        if generic {
            return Ok(config);
        }
    }
    Err(SimError::GeneralPositionFailed {
        attempts: GENERAL_POSITION_ATTEMPTS,
    })
}

pub(crate) fn choose(n: usize, k: usize) -> u128 {
    binomial(n, k)
}
