//! Relative log-likelihood surfaces with a Gaussian comparison sheet.
//!
//! The surface can be gridded in the natural `(alpha, theta)` coordinates
//! or in `(phi, theta)` where `phi = n (1 - alpha) / (n + 1 + theta)` is
//! the match-probability factor and `n` is the database size (one less
//! than the partition's ground-set size). The Gaussian sheet is
//! `-1/2 d' F d` with `F` the observed information, mapped between
//! parametrizations by the change-of-variables Jacobian.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::math::mat2;
use crate::partition::IntegerPartition;
use crate::pyp::{log_eppf, HyperParams};

use super::mle::MleResult;
use super::phi_raw;

/// Relative log-likelihood drop at the chi-squared (2 dof) 95% level.
pub const CONTOUR_LEVEL_95: f64 = -5.991_464_547_107_979 / 2.0;
/// Relative log-likelihood drop at the chi-squared (2 dof) 99% level.
pub const CONTOUR_LEVEL_99: f64 = -9.210_340_371_976_182 / 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceCoords {
    AlphaTheta,
    PhiTheta,
}

#[derive(Debug, Clone)]
pub struct GridSpec {
    pub coords: SurfaceCoords,
    pub x: (f64, f64, usize),
    pub y: (f64, f64, usize),
}

impl GridSpec {
    /// Evenly spaced grid centered on the fit, `spread` posterior standard
    /// deviations wide on each side, clipped to the valid region.
    pub fn centered_on(
        m: &MleResult,
        coords: SurfaceCoords,
        n: usize,
        spread: f64,
        steps: usize,
    ) -> Result<GridSpec> {
        let cov = mat2::inverse(m.observed_fisher)
            .ok_or_else(|| Error::QuadratureSetup("observed information is singular".into()))?;
        let (sd_a, sd_t) = (cov[0][0].sqrt(), cov[1][1].sqrt());
        let t_lo = (m.theta_hat - spread * sd_t).max(-m.alpha_hat + 1e-6);
        let t_hi = m.theta_hat + spread * sd_t;
        let spec = match coords {
            SurfaceCoords::AlphaTheta => GridSpec {
                coords,
                x: (
                    (m.alpha_hat - spread * sd_a).max(1e-6),
                    (m.alpha_hat + spread * sd_a).min(1.0 - 1e-6),
                    steps,
                ),
                y: (t_lo, t_hi, steps),
            },
            SurfaceCoords::PhiTheta => {
                let phi_hat = phi_raw(m.alpha_hat, m.theta_hat, n);
                // Delta-method standard deviation of phi.
                let grad = phi_gradient(m.alpha_hat, m.theta_hat, n);
                let var = mat2::quad_form(cov, grad);
                let sd_p = var.max(0.0).sqrt();
                GridSpec {
                    coords,
                    x: (
                        (phi_hat - spread * sd_p).max(1e-9),
                        phi_hat + spread * sd_p,
                        steps,
                    ),
                    y: (t_lo, t_hi, steps),
                }
            }
        };
        Ok(spec)
    }

    fn axis(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
        let step = if count > 1 {
            (hi - lo) / (count - 1) as f64
        } else {
            0.0
        };
        (0..count).map(move |i| lo + step * i as f64)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SurfaceRow {
    pub param1: f64,
    pub param2: f64,
    pub rel_loglik: f64,
    pub gaussian_rel_loglik: f64,
}

/// Evaluate the relative log-likelihood (maximum subtracted) and the
/// Gaussian sheet over the grid. Grid nodes outside the valid parameter
/// region are skipped.
pub fn loglik_surface(
    part: &IntegerPartition,
    spec: &GridSpec,
    m: &MleResult,
) -> Result<Vec<SurfaceRow>> {
    let n =
        part.n().checked_sub(1).filter(|&n| n >= 1).ok_or_else(|| {
            Error::InvalidPartition("surface needs a partition of at least 2".into())
        })?;
    if !m.is_interior() {
        return Err(Error::UnusableMle {
            reason: if m.boundary {
                "boundary-flagged"
            } else {
                "non-converged"
            },
        });
    }
    let fisher_phi = match spec.coords {
        SurfaceCoords::AlphaTheta => m.observed_fisher,
        SurfaceCoords::PhiTheta => phi_space_fisher(m, n)?,
    };
    let phi_hat = phi_raw(m.alpha_hat, m.theta_hat, n);

    let (x_lo, x_hi, x_count) = spec.x;
    let (y_lo, y_hi, y_count) = spec.y;
    let mut rows = Vec::with_capacity(x_count * y_count);
    for x in GridSpec::axis(x_lo, x_hi, x_count) {
        for theta in GridSpec::axis(y_lo, y_hi, y_count) {
            let alpha = match spec.coords {
                SurfaceCoords::AlphaTheta => x,
                // Invert phi = n (1 - alpha) / (n + 1 + theta).
                SurfaceCoords::PhiTheta => 1.0 - x * (n as f64 + 1.0 + theta) / n as f64,
            };
            let Ok(h) = HyperParams::new(alpha, theta) else {
                continue;
            };
            let rel = log_eppf(part, &h) - m.loglik_at_max;
            let d = match spec.coords {
                SurfaceCoords::AlphaTheta => [x - m.alpha_hat, theta - m.theta_hat],
                SurfaceCoords::PhiTheta => [x - phi_hat, theta - m.theta_hat],
            };
            let gaussian = -0.5 * mat2::quad_form(fisher_phi, d);
            rows.push(SurfaceRow {
                param1: x,
                param2: theta,
                rel_loglik: rel,
                gaussian_rel_loglik: gaussian,
            });
        }
    }
    Ok(rows)
}

fn phi_gradient(alpha: f64, theta: f64, n: usize) -> [f64; 2] {
    let n = n as f64;
    let denom = n + 1.0 + theta;
    [-n / denom, -n * (1.0 - alpha) / (denom * denom)]
}

/// Observed information in `(phi, theta)` coordinates:
/// `(J^-1)' F (J^-1)` with `J` the Jacobian of the map at the fit.
fn phi_space_fisher(m: &MleResult, n: usize) -> Result<[[f64; 2]; 2]> {
    let [ga, gt] = phi_gradient(m.alpha_hat, m.theta_hat, n);
    let jac = [[ga, gt], [0.0, 1.0]];
    let jac_inv = mat2::inverse(jac)
        .ok_or_else(|| Error::QuadratureSetup("phi reparametrization is singular".into()))?;
    Ok(mat2::congruence(jac_inv, m.observed_fisher))
}
