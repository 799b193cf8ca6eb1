//! Two-parameter Poisson-Dirichlet machinery: exchangeable partition
//! probabilities, the sequential (Chinese-restaurant) sampler, the
//! stick-breaking construction, and asymptotic growth diagnostics.

mod crp;
mod eppf;
mod growth;
mod sticks;

pub use crp::{crp_assignments, crp_counts, crp_sample, CrpSampler};
pub use eppf::{log_eppf, log_eppf_of, log_rising_factorial};
pub use growth::{block_growth_diagnostics, GrowthPoint};
pub use sticks::{power_law_slope, stick_breaking_sample, WeightVector};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Discount and concentration pair `(alpha, theta)`.
///
/// Valid when `0 <= alpha < 1` and `theta > -alpha`. The working range of
/// the model is `0 < alpha < 1`; `alpha == 0` is admitted only so the
/// partition probability can be cross-checked against its one-parameter
/// special case, and the samplers reject it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHyperParams", into = "RawHyperParams")]
pub struct HyperParams {
    alpha: f64,
    theta: f64,
}

#[derive(Serialize, Deserialize)]
struct RawHyperParams {
    alpha: f64,
    theta: f64,
}

impl From<HyperParams> for RawHyperParams {
    fn from(h: HyperParams) -> Self {
        RawHyperParams {
            alpha: h.alpha,
            theta: h.theta,
        }
    }
}

impl TryFrom<RawHyperParams> for HyperParams {
    type Error = Error;
    fn try_from(raw: RawHyperParams) -> Result<Self> {
        HyperParams::new(raw.alpha, raw.theta)
    }
}

impl HyperParams {
    pub fn new(alpha: f64, theta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) || theta <= -alpha || !theta.is_finite() {
            return Err(Error::InvalidHyperParams { alpha, theta });
        }
        Ok(HyperParams { alpha, theta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Check the stronger sampler requirement `alpha > 0`.
    pub fn require_positive_discount(&self) -> Result<()> {
        if self.alpha == 0.0 {
            return Err(Error::ZeroDiscount { alpha: self.alpha });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validity_region() {
        assert!(HyperParams::new(0.5, 216.0).is_ok());
        assert!(HyperParams::new(0.0, 0.5).is_ok());
        assert!(HyperParams::new(0.5, -0.45).is_ok());
        assert!(HyperParams::new(0.5, -0.5).is_err()); // theta must exceed -alpha
        assert!(HyperParams::new(1.0, 1.0).is_err());
        assert!(HyperParams::new(-0.1, 1.0).is_err());
        assert!(HyperParams::new(0.5, f64::NAN).is_err());
    }

    #[test]
    fn sampler_guard_rejects_zero_discount() {
        let h = HyperParams::new(0.0, 1.0).unwrap();
        assert!(h.require_positive_discount().is_err());
        let h = HyperParams::new(0.3, 1.0).unwrap();
        assert!(h.require_positive_discount().is_ok());
    }
}
