use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by every module.
///
/// The defaults are tuned for exact or two-decimal inputs; callers working
/// with noisy measured matrices usually raise `zero`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Max entrywise deviation from Hermiticity.
    pub herm: f64,
    /// Eigenvalue accuracy, relative to the spectral radius.
    pub eig: f64,
    /// Deviation of the trace from one.
    pub trace: f64,
    /// Most negative eigenvalue still accepted as positive semidefinite.
    pub psd: f64,
    /// Magnitude below which an entry counts as vanishing.
    pub zero: f64,
    /// Equality tolerance for observable eigenvalue labels.
    pub label: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-10,
            eig: 1e-10,
            trace: 1e-9,
            psd: 1e-9,
            zero: 1e-12,
            label: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn with_zero(mut self, zero: f64) -> Self {
        self.zero = zero;
        self
    }
}
