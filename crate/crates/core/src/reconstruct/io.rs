use serde::{Deserialize, Serialize};

use super::{DistanceState, ReconstructError};

/// Reveal rounds as exchanged on disk: `{n, d, rounds: [[[i, j, dist2], ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RevealFile {
    pub n: usize,
    pub d: usize,
    pub rounds: Vec<Vec<(usize, usize, f64)>>,
}

impl RevealFile {
    pub fn from_rounds(d: usize, rounds: &[DistanceState]) -> Self {
        Self {
            n: rounds.first().map_or(0, DistanceState::n),
            d,
            rounds: rounds
                .iter()
                .map(|r| r.pairs().map(|(i, j, d2, _)| (i, j, d2)).collect())
                .collect(),
        }
    }

    pub fn to_rounds(&self) -> Result<Vec<DistanceState>, ReconstructError> {
        self.rounds
            .iter()
            .map(|r| DistanceState::from_pairs(self.n, r.iter().copied()))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializing reveal rounds")
    }

    pub fn from_json(text: &str) -> Result<Self, ReconstructError> {
        serde_json::from_str(text).map_err(|e| ReconstructError::Format(e.to_string()))
    }
}
