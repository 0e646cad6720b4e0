use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by every validation and comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Hermiticity, relative to the max-entry norm of the operator.
    pub herm: f64,
    /// Smallest eigenvalue accepted as "non-negative".
    pub psd: f64,
    /// General numerical agreement (traces, normalization, reconstruction).
    pub num: f64,
    /// Outcome probabilities below this cannot be conditioned on.
    pub prob: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        herm: 1e-10,
        psd: 1e-9,
        num: 1e-9,
        prob: 1e-12,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
