//! Scalar and equicorrelated Gaussian functions.

pub mod bounds;
pub mod equicorr;
pub mod normal;

use serde::{Deserialize, Serialize};

pub use equicorr::{
    equicorr_hazard_gradient, equicorr_log_survival, equicorr_survival, orthant, truncated_first_moment,
    EquicorrSpec, OrthantIntegral, QuadratureConfig,
};
pub use normal::{mills_hazard, survival as std_normal_survival};

/// A real number or −∞. Calibration functions start at h(0) = −∞, and that
/// value is carried explicitly rather than as a large negative float.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::NegInf => None,
            ExtReal::Finite(x) => Some(x),
        }
    }

    pub fn is_neg_inf(self) -> bool {
        matches!(self, ExtReal::NegInf)
    }

    /// Affine map a·x + b with a > 0, keeping −∞ fixed.
    pub fn affine(self, a: f64, b: f64) -> ExtReal {
        match self {
            ExtReal::NegInf => ExtReal::NegInf,
            ExtReal::Finite(x) => ExtReal::Finite(a * x + b),
        }
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        if x == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(x)
        }
    }
}
