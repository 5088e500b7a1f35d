use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::geometry::Tolerance;
use crate::sim::InstanceSpec;

pub const SCHEMA_VERSION: u32 = 1;

/// A harness configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema: u32,
    /// Master seed; trial `i` draws from a stream derived from `(seed, i)`.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerance: Tolerance,
    #[serde(default)]
    pub trials: Option<TrialsConfig>,
    #[serde(default)]
    pub scan: Option<ScanConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialsConfig {
    /// Instance template; its `seed` is replaced per trial unless the
    /// generator is explicit.
    pub instance: InstanceSpec,
    pub p: f64,
    /// Sprinkling rounds; defaults to three per dimension.
    #[serde(default)]
    pub rounds: Option<usize>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    pub count: usize,
    /// Never reveal the generator's ambiguous pair, if it has one.
    #[serde(default)]
    pub withhold_hidden_pair: bool,
}

impl TrialsConfig {
    pub fn rounds(&self) -> usize {
        self.rounds.unwrap_or(3 * self.instance.d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanTarget {
    /// `K_{d+3}`-bootstrap percolation of `G(n, p)`.
    Percolation,
    /// The pipeline keeps at least `(1 - delta) n` points of a uniform cloud.
    Reconstruction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub d: usize,
    pub ns: Vec<usize>,
    pub ps: Vec<f64>,
    pub trials: usize,
    #[serde(default = "default_target")]
    pub target: ScanTarget,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn default_delta() -> f64 {
    0.1
}

fn default_target() -> ScanTarget {
    ScanTarget::Percolation
}

fn invalid(field: &str, message: impl std::fmt::Display) -> HarnessError {
    HarnessError::Config(format!("{field}: {message}"))
}

impl Config {
    /// Parses and validates; serde errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let config: Config =
            serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializing config")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.schema != SCHEMA_VERSION {
            return Err(invalid(
                "schema",
                format!("unsupported version {}", self.schema),
            ));
        }
        if !(self.tolerance.eps_rel > 0.0 && self.tolerance.eps_rel < 1.0) {
            return Err(invalid("tolerance.eps_rel", "must lie in (0, 1)"));
        }
        if let Some(t) = &self.trials {
            t.instance
                .validate()
                .map_err(|e| invalid("trials.instance", e))?;
            if !(0.0..=1.0).contains(&t.p) {
                return Err(invalid("trials.p", "must lie in [0, 1]"));
            }
            if t.rounds() < 1 {
                return Err(invalid("trials.rounds", "must be at least 1"));
            }
            if !(t.delta > 0.0 && t.delta < 1.0) {
                return Err(invalid("trials.delta", "must lie in (0, 1)"));
            }
        }
        if let Some(s) = &self.scan {
            if s.d < 1 {
                return Err(invalid("scan.d", "must be at least 1"));
            }
            if s.ns.len() < 3 {
                return Err(invalid("scan.ns", "need at least three values of n"));
            }
            if s.ns.iter().any(|&n| n < s.d + 3) {
                return Err(invalid("scan.ns", "every n must be at least d + 3"));
            }
            if s.ps.len() < 2 || s.ps.iter().any(|p| !(*p > 0.0 && *p <= 1.0)) {
                return Err(invalid(
                    "scan.ps",
                    "need at least two probabilities in (0, 1]",
                ));
            }
            if s.ps.windows(2).any(|w| w[0] >= w[1]) {
                return Err(invalid("scan.ps", "must be strictly increasing"));
            }
            if s.trials < 1 {
                return Err(invalid("scan.trials", "must be at least 1"));
            }
            if !(s.delta > 0.0 && s.delta < 1.0) {
                return Err(invalid("scan.delta", "must lie in (0, 1)"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIALS: &str = r#"{
        "schema": 1,
        "seed": 7,
        "trials": {
            "instance": {"n": 20, "d": 2, "generator": {"kind": "uniform_cube"}},
            "p": 0.6,
            "count": 4
        }
    }"#;

    #[test]
    fn parses_and_defaults() {
        let c = Config::from_json(TRIALS).unwrap();
        let t = c.trials.as_ref().unwrap();
        assert_eq!((t.rounds(), t.delta, c.seed), (6, 0.1, 7));
        assert_eq!(Config::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn reports_bad_fields() {
        let typo = TRIALS.replace("\"count\"", "\"cuont\"");
        let err = Config::from_json(&typo).unwrap_err().to_string();
        assert!(err.contains("cuont") && err.contains("line"), "{err}");
        let schema = TRIALS.replace("\"schema\": 1", "\"schema\": 2");
        assert!(Config::from_json(&schema)
            .unwrap_err()
            .to_string()
            .contains("schema"));
        let p = TRIALS.replace("0.6", "1.5");
        assert!(Config::from_json(&p)
            .unwrap_err()
            .to_string()
            .contains("trials.p"));
        let scan =
            r#"{"schema": 1, "scan": {"d": 1, "ns": [10, 20], "ps": [0.1, 0.2], "trials": 5}}"#;
        assert!(Config::from_json(scan)
            .unwrap_err()
            .to_string()
            .contains("scan.ns"));
    }
}
