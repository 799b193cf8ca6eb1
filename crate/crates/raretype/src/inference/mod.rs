//! Hyperparameter inference and the likelihood ratio.
//!
//! Under the partition model, the likelihood ratio for the rare type match
//! reduces to `n / E(Phi | partition)` where
//! `Phi = n (1 - alpha) / (n + 1 + theta)` and the expectation is over the
//! hyperparameter posterior given the suspect-extended partition. A point
//! hyperprior collapses the ratio to the closed form
//! `(n + 1 + theta) / (1 - alpha)`, which is also the plug-in
//! approximation at the fitted parameters.

mod mle;
mod quadrature;
mod surface;

pub use mle::{mle_fit, mle_fit_with, observed_information, MleOptions, MleResult};
pub use quadrature::{
    posterior_mean_phi, posterior_mean_phi_centered, posterior_mean_phi_with, PhiPosterior,
    QuadratureOptions,
};
pub use surface::{
    loglik_surface, GridSpec, SurfaceCoords, SurfaceRow, CONTOUR_LEVEL_95, CONTOUR_LEVEL_99,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::SetPartition;
use crate::pyp::HyperParams;

/// The match-probability factor `phi = n (1 - alpha) / (n + 1 + theta)`.
pub fn phi(h: &HyperParams, n: usize) -> f64 {
    phi_raw(h.alpha(), h.theta(), n)
}

pub(crate) fn phi_raw(alpha: f64, theta: f64, n: usize) -> f64 {
    n as f64 * (1.0 - alpha) / (n as f64 + 1.0 + theta)
}

/// Marginal density for theta in a product hyperprior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaPrior {
    Exponential { rate: f64 },
    Uniform { lo: f64, hi: f64 },
}

/// Prior over the hyperparameters `(alpha, theta)`.
///
/// The model never pins this down, so it is configurable: the default is
/// diffuse over the magnitudes a large reference database produces, and the
/// point mass exists to make the closed-form collapse exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hyperprior {
    PointMass {
        alpha: f64,
        theta: f64,
    },
    Product {
        alpha_lo: f64,
        alpha_hi: f64,
        theta: ThetaPrior,
    },
}

impl Hyperprior {
    /// alpha ~ Uniform(0, 1), theta ~ Exponential(mean 500), independent.
    pub fn default_diffuse() -> Hyperprior {
        Hyperprior::Product {
            alpha_lo: 0.0,
            alpha_hi: 1.0,
            theta: ThetaPrior::Exponential { rate: 1.0 / 500.0 },
        }
    }

    pub fn point_mass(alpha: f64, theta: f64) -> Result<Hyperprior> {
        HyperParams::new(alpha, theta)?;
        Ok(Hyperprior::PointMass { alpha, theta })
    }

    pub fn product_uniform(alpha: (f64, f64), theta: (f64, f64)) -> Result<Hyperprior> {
        Self::product(
            alpha,
            ThetaPrior::Uniform {
                lo: theta.0,
                hi: theta.1,
            },
        )
    }

    pub fn product(alpha: (f64, f64), theta: ThetaPrior) -> Result<Hyperprior> {
        let (alpha_lo, alpha_hi) = alpha;
        if !(0.0..=1.0).contains(&alpha_lo)
            || !(0.0..=1.0).contains(&alpha_hi)
            || alpha_lo >= alpha_hi
        {
            return Err(Error::InvalidPrior(format!(
                "alpha range ({alpha_lo}, {alpha_hi}) must be an interval inside [0, 1]"
            )));
        }
        match theta {
            ThetaPrior::Exponential { rate } => {
                if rate <= 0.0 || !rate.is_finite() {
                    return Err(Error::InvalidPrior(format!(
                        "exponential rate {rate} must be positive and finite"
                    )));
                }
            }
            ThetaPrior::Uniform { lo, hi } => {
                if lo.is_nan() || lo < 0.0 || lo >= hi || !hi.is_finite() {
                    return Err(Error::InvalidPrior(format!(
                        "theta range ({lo}, {hi}) must be a nonnegative interval"
                    )));
                }
            }
        }
        Ok(Hyperprior::Product {
            alpha_lo,
            alpha_hi,
            theta,
        })
    }

    /// Log density at `(alpha, theta)`; `-inf` outside the support. The
    /// support never leaves the valid region, so a positive density implies
    /// valid hyperparameters.
    pub fn log_density(&self, alpha: f64, theta: f64) -> f64 {
        match self {
            Hyperprior::PointMass { .. } => {
                // Degenerate; handled as an exact special case upstream.
                f64::NEG_INFINITY
            }
            Hyperprior::Product {
                alpha_lo,
                alpha_hi,
                theta: theta_prior,
            } => {
                if alpha <= *alpha_lo || alpha >= *alpha_hi {
                    return f64::NEG_INFINITY;
                }
                let alpha_part = -(alpha_hi - alpha_lo).ln();
                let theta_part = match theta_prior {
                    ThetaPrior::Exponential { rate } => {
                        if theta <= 0.0 {
                            return f64::NEG_INFINITY;
                        }
                        rate.ln() - rate * theta
                    }
                    ThetaPrior::Uniform { lo, hi } => {
                        if theta <= *lo || theta >= *hi {
                            return f64::NEG_INFINITY;
                        }
                        -(hi - lo).ln()
                    }
                };
                alpha_part + theta_part
            }
        }
    }

    /// Bounding box of the support as (alpha_lo, alpha_hi, theta_lo,
    /// theta_hi); infinite where unbounded.
    pub(crate) fn support_box(&self) -> (f64, f64, f64, f64) {
        match self {
            Hyperprior::PointMass { alpha, theta } => (*alpha, *alpha, *theta, *theta),
            Hyperprior::Product {
                alpha_lo,
                alpha_hi,
                theta,
            } => match theta {
                ThetaPrior::Exponential { .. } => (*alpha_lo, *alpha_hi, 0.0, f64::INFINITY),
                ThetaPrior::Uniform { lo, hi } => (*alpha_lo, *alpha_hi, *lo, *hi),
            },
        }
    }
}

/// Likelihood-ratio report for a rare-type match.
#[derive(Debug, Clone, Serialize)]
pub struct LrReport {
    /// `n / E(Phi | partition)` under the hyperprior.
    pub lr_bayes: f64,
    /// Closed form at the fitted (or point-prior) parameters; absent when
    /// the fit is boundary-flagged and the plug-in form is meaningless.
    pub lr_plugin: Option<f64>,
    pub posterior_mean_phi: f64,
    pub quadrature_error_estimate: f64,
    /// The adaptive quadrature met its tolerance before its node cap.
    pub quadrature_converged: bool,
    pub n: usize,
}

/// Bayesian likelihood ratio for the suspect-extended partition.
pub fn lr_bayes(p_plus: &SetPartition, prior: &Hyperprior) -> Result<LrReport> {
    lr_bayes_with(
        p_plus,
        prior,
        &MleOptions::default(),
        &QuadratureOptions::default(),
    )
}

pub fn lr_bayes_with(
    p_plus: &SetPartition,
    prior: &Hyperprior,
    mle_opts: &MleOptions,
    quad_opts: &QuadratureOptions,
) -> Result<LrReport> {
    if !p_plus.is_rare_type() {
        return Err(Error::NotRareType);
    }
    let n = p_plus.n() - 1;

    if let Hyperprior::PointMass { alpha, theta } = prior {
        // E(Phi) is phi itself, so the ratio collapses exactly.
        let value = (n as f64 + 1.0 + theta) / (1.0 - alpha);
        return Ok(LrReport {
            lr_bayes: value,
            lr_plugin: Some(value),
            posterior_mean_phi: phi_raw(*alpha, *theta, n),
            quadrature_error_estimate: 0.0,
            quadrature_converged: true,
            n,
        });
    }

    let part = p_plus.to_integer_partition();
    let fit = mle_fit_with(&part, mle_opts)?;
    let post = posterior_mean_phi_centered(&part, n, prior, &fit, quad_opts)?;
    Ok(LrReport {
        lr_bayes: n as f64 / post.value,
        lr_plugin: lr_plugin(n, &fit).ok(),
        posterior_mean_phi: post.value,
        quadrature_error_estimate: post.error_estimate,
        quadrature_converged: post.converged,
        n,
    })
}

/// Plug-in likelihood ratio `(n + 1 + theta_hat) / (1 - alpha_hat)`.
///
/// Refuses boundary-flagged or non-converged fits.
pub fn lr_plugin(n: usize, m: &MleResult) -> Result<f64> {
    if m.boundary {
        return Err(Error::UnusableMle {
            reason: "boundary-flagged",
        });
    }
    if !m.converged {
        return Err(Error::UnusableMle {
            reason: "non-converged",
        });
    }
    Ok((n as f64 + 1.0 + m.theta_hat) / (1.0 - m.alpha_hat))
}
