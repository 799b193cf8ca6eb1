//! Stick-breaking construction of the random weight vector.
//!
//! `W_i = V_i * prod_{j<i} (1 - V_j)` with independent
//! `V_i ~ Beta(1 - alpha, theta + i*alpha)`. Sorting the first `M` weights
//! in decreasing order approximates the ranked frequency vector; the ranked
//! tail decays like `rank^(-1/alpha)`, which is what `power_law_slope`
//! measures.

use rand_distr::{Beta, Distribution};

use crate::error::{Error, Result};
use crate::math::{kahan_sum, ls_slope};
use crate::seed::Seed;

use super::HyperParams;

/// First `M` stick-breaking weights plus the residual mass of the
/// unbroken remainder.
#[derive(Debug, Clone)]
pub struct WeightVector {
    weights: Vec<f64>,
    residual: f64,
}

impl WeightVector {
    /// Weights in stick order (the order they were broken).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn truncation(&self) -> usize {
        self.weights.len()
    }

    /// Weights sorted in decreasing order.
    pub fn ranked(&self) -> Vec<f64> {
        let mut v = self.weights.clone();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        v
    }

    /// Least-squares slope of log(weight) against log(rank) over the
    /// 1-based rank interval `[lo, hi]` of the ranked weights.
    pub fn tail_slope(&self, lo: usize, hi: usize) -> Result<f64> {
        power_law_slope(&self.ranked(), lo, hi)
    }

    /// Total mass check: weights plus residual must account for 1.
    pub fn validate(&self) -> Result<()> {
        if self.weights.iter().any(|&w| w <= 0.0 || w >= 1.0) {
            return Err(Error::InvalidFrequencies(
                "stick weights must lie in (0, 1)".into(),
            ));
        }
        let total = kahan_sum(self.weights.iter().cloned()) + self.residual;
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidFrequencies(format!(
                "weights + residual = {total}, expected 1"
            )));
        }
        Ok(())
    }
}

/// Draw the first `truncation` weights of the stick-breaking construction.
pub fn stick_breaking_sample(
    h: &HyperParams,
    truncation: usize,
    seed: Seed,
) -> Result<WeightVector> {
    h.require_positive_discount()?;
    assert!(truncation >= 1, "need at least one stick");
    let alpha = h.alpha();
    let theta = h.theta();
    let mut rng = seed.rng();
    let mut weights = Vec::with_capacity(truncation);
    let mut remaining = 1.0f64;
    for i in 1..=truncation {
        let beta = Beta::new(1.0 - alpha, theta + i as f64 * alpha)
            .expect("parameters positive on the validity region");
        let v: f64 = beta.sample(&mut rng);
        weights.push(v * remaining);
        remaining *= 1.0 - v;
    }
    Ok(WeightVector {
        weights,
        residual: remaining,
    })
}

/// Least-squares slope of log(w) against log(rank) over ranks `[lo, hi]`
/// (1-based, inclusive) of an already-ranked weight sequence.
pub fn power_law_slope(ranked: &[f64], lo: usize, hi: usize) -> Result<f64> {
    if lo < 1 || lo >= hi || hi > ranked.len() {
        return Err(Error::DegenerateRange(format!(
            "ranks [{lo}, {hi}] invalid for {} weights",
            ranked.len()
        )));
    }
    let slice = &ranked[lo - 1..hi];
    if slice.iter().any(|&w| w <= 0.0) {
        return Err(Error::DegenerateRange(
            "weights must be positive on the fit range".into(),
        ));
    }
    let xs: Vec<f64> = (lo..=hi).map(|r| (r as f64).ln()).collect();
    let ys: Vec<f64> = slice.iter().map(|w| w.ln()).collect();
    Ok(ls_slope(&xs, &ys))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_is_a_sub_probability_vector() {
        let h = HyperParams::new(0.5, 2.0).unwrap();
        let w = stick_breaking_sample(&h, 2_000, Seed(9)).unwrap();
        w.validate().unwrap();
        let mut partial = 0.0;
        for &x in w.weights() {
            assert!(x > 0.0);
            partial += x;
            assert!(partial < 1.0);
        }
    }

    #[test]
    fn first_stick_mean_matches_beta_moment() {
        // E[V_1] = (1 - alpha) / (1 + theta).
        let (alpha, theta) = (0.4, 3.0);
        let h = HyperParams::new(alpha, theta).unwrap();
        let reps = 100_000u64;
        let master = Seed(2024);
        let mut sum = 0.0;
        for i in 0..reps {
            let w = stick_breaking_sample(&h, 1, master.child(i)).unwrap();
            sum += w.weights()[0];
        }
        let mean = sum / reps as f64;
        let expect = (1.0 - alpha) / (1.0 + theta);
        let var = (1.0 - alpha) * (theta + alpha) / ((1.0 + theta) * (1.0 + theta) * (2.0 + theta));
        let se = (var / reps as f64).sqrt();
        assert!(
            (mean - expect).abs() < 4.0 * se,
            "mean {mean} vs {expect} (se {se})"
        );
    }

    #[test]
    fn exact_power_law_recovers_exponent() {
        let ranked: Vec<f64> = (1..=5_000).map(|i| 0.3 * (i as f64).powf(-2.0)).collect();
        let slope = power_law_slope(&ranked, 10, 3_000).unwrap();
        assert!((slope + 2.0).abs() < 1e-9, "slope {slope}");
    }

    #[test]
    fn constant_weights_have_zero_slope() {
        let ranked = vec![0.001; 100];
        let slope = power_law_slope(&ranked, 1, 100).unwrap();
        assert!(slope.abs() < 1e-12);
    }

    /// The ranked tail follows rank^(-1/alpha). The regime starts at ranks
    /// well past the concentration, so a large theta needs a deep window.
    #[test]
    fn ranked_tail_slope_matches_minus_inverse_alpha() {
        let h = HyperParams::new(0.5, 0.0).unwrap();
        let w = stick_breaking_sample(&h, 100_000, Seed(41)).unwrap();
        let slope = w.tail_slope(1_000, 10_000).unwrap();
        assert!((slope + 2.0).abs() < 0.15, "slope {slope}");

        let h = HyperParams::new(0.5, 216.0).unwrap();
        let w = stick_breaking_sample(&h, 200_000, Seed(41)).unwrap();
        let slope = w.tail_slope(10_000, 60_000).unwrap();
        assert!((slope + 2.0).abs() < 0.15, "slope {slope} at theta 216");
    }

    #[test]
    fn degenerate_ranges_are_errors() {
        let ranked = vec![0.5, 0.3, 0.2];
        assert!(power_law_slope(&ranked, 2, 2).is_err());
        assert!(power_law_slope(&ranked, 1, 4).is_err());
        assert!(power_law_slope(&ranked, 0, 2).is_err());
    }

    #[test]
    fn determinism_and_zero_discount_guard() {
        let h = HyperParams::new(0.5, 1.0).unwrap();
        let a = stick_breaking_sample(&h, 100, Seed(5)).unwrap();
        let b = stick_breaking_sample(&h, 100, Seed(5)).unwrap();
        assert_eq!(a.weights(), b.weights());
        assert_eq!(a.residual(), b.residual());
        let ewens = HyperParams::new(0.0, 1.0).unwrap();
        assert!(stick_breaking_sample(&ewens, 10, Seed(0)).is_err());
    }
}
