use serde::{Deserialize, Serialize};

use super::GeometryError;

/// Numerical thresholds shared by every geometric test.
///
/// `eps_rel` is a scale-free threshold: an eigenvalue counts as nonzero when it
/// exceeds `eps_rel * trace`. `exact_mode` switches positive-definiteness and
/// rank decisions to exact rational arithmetic on the (dyadic) input values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub eps_rel: f64,
    #[serde(default)]
    pub exact_mode: bool,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            eps_rel: 1e-9,
            exact_mode: false,
        }
    }
}

impl Tolerance {
    pub fn new(eps_rel: f64, exact_mode: bool) -> Result<Self, GeometryError> {
        if !(eps_rel > 0.0 && eps_rel < 1.0) {
            return Err(GeometryError::InvalidTolerance(eps_rel));
        }
        Ok(Self {
            eps_rel,
            exact_mode,
        })
    }

    pub fn exact() -> Self {
        Self {
            exact_mode: true,
            ..Self::default()
        }
    }

    /// Smallest eigenvalue that still counts as nonzero for a matrix of the given trace.
    pub fn eigen_floor(&self, trace: f64) -> f64 {
        self.eps_rel * trace
    }

    /// Slack allowed on squared-distance residuals (consistency checks, clamping).
    ///
    /// Residuals pass through a linear solve, so they carry roughly the square
    /// root of the eigenvalue threshold in relative error.
    pub fn residual_floor(&self, scale: f64) -> f64 {
        self.eps_rel.sqrt() * scale.max(f64::MIN_POSITIVE)
    }
}
