//! Posterior expectation of the match-probability factor by adaptive
//! tensor quadrature in studentized coordinates.
//!
//! The integrand `exp(loglik) * prior` is nearly Gaussian around the
//! maximum-likelihood point, so nodes live in coordinates centered at the
//! MLE and scaled by the observed information. The node box is the
//! intersection of a `[-w, w]^2` studentized ball with the prior's support
//! (so narrow priors are still resolved); `w` widens until the captured
//! mass stabilizes, then the node count doubles until the value stabilizes.

use crate::error::{Error, Result};
use crate::math::{gauss_legendre, mat2};
use crate::partition::{IntegerPartition, SetPartition};
use crate::pyp::{log_eppf, HyperParams};

use super::mle::{mle_fit_with, MleOptions, MleResult};
use super::{phi_raw, Hyperprior};

#[derive(Debug, Clone)]
pub struct QuadratureOptions {
    /// Half-width of the initial node box, in posterior standard deviations.
    pub initial_halfwidth: f64,
    /// Nodes per axis for a box spanning the initial width.
    pub base_nodes: usize,
    /// Stop widening when the captured mass changes by less than this
    /// relative amount.
    pub mass_tol: f64,
    /// Stop refining when the value changes by less than this relative
    /// amount.
    pub value_tol: f64,
    pub max_widenings: usize,
    /// Cap on nodes per axis; hitting it clears `converged`.
    pub max_nodes: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            initial_halfwidth: 6.0,
            base_nodes: 33,
            mass_tol: 1e-6,
            value_tol: 1e-9,
            max_widenings: 10,
            max_nodes: 2200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PhiPosterior {
    pub value: f64,
    /// Safety-factored difference between the last two refinements; this is
    /// numerical integration error, not model error.
    pub error_estimate: f64,
    pub converged: bool,
    pub nodes_per_axis: usize,
    pub halfwidth: f64,
}

/// `E(phi | partition)` under the given hyperprior.
///
/// Requires the rare-type configuration: the partition must be the
/// database partition extended with the suspect singleton.
pub fn posterior_mean_phi(p_plus: &SetPartition, prior: &Hyperprior) -> Result<PhiPosterior> {
    posterior_mean_phi_with(
        p_plus,
        prior,
        &MleOptions::default(),
        &QuadratureOptions::default(),
    )
}

pub fn posterior_mean_phi_with(
    p_plus: &SetPartition,
    prior: &Hyperprior,
    mle_opts: &MleOptions,
    quad_opts: &QuadratureOptions,
) -> Result<PhiPosterior> {
    if !p_plus.is_rare_type() {
        return Err(Error::NotRareType);
    }
    let part = p_plus.to_integer_partition();
    let n = p_plus.n() - 1;

    if let Hyperprior::PointMass { alpha, theta } = prior {
        // Degenerate prior: the expectation is the integrand at the point.
        return Ok(PhiPosterior {
            value: phi_raw(*alpha, *theta, n),
            error_estimate: 0.0,
            converged: true,
            nodes_per_axis: 1,
            halfwidth: 0.0,
        });
    }

    let mle = mle_fit_with(&part, mle_opts)?;
    posterior_mean_phi_centered(&part, n, prior, &mle, quad_opts)
}

/// Quadrature around a precomputed center; shared by the LR entry points so
/// the fit is done once.
///
/// Integration runs in `(alpha, v)` with `v = ln(theta)`: every
/// hyperprior's support lies in `theta > 0`, so the box maps exactly onto
/// it (no support edge ever cuts through the node box), and the
/// concentration's long exponential tail compresses to a few units of
/// `v`, keeping the node box small even when the data barely identify
/// `theta`. A
/// boundary-flagged or non-converged fit still yields a valid posterior
/// (the data are simply thin); the node frame then falls back to wide
/// diagonal scales and relies on the support clipping and mass widening.
pub fn posterior_mean_phi_centered(
    part: &IntegerPartition,
    n: usize,
    prior: &Hyperprior,
    center: &MleResult,
    opts: &QuadratureOptions,
) -> Result<PhiPosterior> {
    let (center_point, scale) = studentizing_frame(prior, center);

    // Image of the prior's support under the studentizing map
    // z = L^-1 ((alpha, v) - center); unbounded support maps to
    // infinities. The v-interval is a conservative superset (nodes beyond
    // the true support get zero density anyway).
    let (a_lo, a_hi, t_lo, t_hi) = prior.support_box();
    let v_lo = if t_lo > 0.0 {
        t_lo.ln()
    } else {
        f64::NEG_INFINITY
    };
    let v_hi = if t_hi.is_finite() {
        t_hi.ln()
    } else {
        f64::INFINITY
    };
    let z1_lo = (a_lo - center_point[0]) / scale[0][0];
    let z1_hi = (a_hi - center_point[0]) / scale[0][0];
    let cross = |z1: f64| scale[1][0] * z1;
    let cross_lo = cross(z1_lo).min(cross(z1_hi));
    let cross_hi = cross(z1_lo).max(cross(z1_hi));
    let z2_lo = sub_inf(v_lo - center_point[1], cross_hi) / scale[1][1];
    let z2_hi = sub_inf(v_hi - center_point[1], cross_lo) / scale[1][1];
    let support_z = [[z1_lo, z1_hi], [z2_lo, z2_hi]];

    // Log of likelihood * prior * Jacobian, the Jacobian of
    // theta = e^v being e^v = theta.
    let log_integrand = |alpha: f64, v: f64| -> f64 {
        let theta = v.exp();
        let lp = prior.log_density(alpha, theta);
        if lp == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        match HyperParams::new(alpha, theta) {
            Ok(h) => log_eppf(part, &h) + lp + v,
            Err(_) => f64::NEG_INFINITY,
        }
    };

    let density = opts.base_nodes as f64 / (2.0 * opts.initial_halfwidth);
    let axis_box = |axis: usize, w: f64| -> Option<(f64, f64)> {
        let lo = support_z[axis][0].max(-w);
        let hi = support_z[axis][1].min(w);
        (lo < hi).then_some((lo, hi))
    };
    let nodes_for = |len: f64| -> usize {
        let m = (density * len).ceil() as usize;
        (m | 1).clamp(17, opts.max_nodes.max(17))
    };

    // One grid evaluation at width w with a node-count multiplier. Returns
    // (weighted numerator, weighted mass, nodes per axis) relative to a
    // fixed shift so masses are comparable across calls.
    let mut shift: Option<f64> = None;
    let mut eval = |w: f64, refine: usize| -> (f64, f64, usize) {
        let (Some((lo1, hi1)), Some((lo2, hi2))) = (axis_box(0, w), axis_box(1, w)) else {
            return (0.0, 0.0, 0);
        };
        let cap = opts.max_nodes | 1;
        let m1 = ((nodes_for(hi1 - lo1) * refine) | 1).min(cap);
        let m2 = ((nodes_for(hi2 - lo2) * refine) | 1).min(cap);
        let (x1, w1) = gauss_legendre(m1);
        let (x2, w2) = gauss_legendre(m2);
        let (c1, h1) = (0.5 * (lo1 + hi1), 0.5 * (hi1 - lo1));
        let (c2, h2) = (0.5 * (lo2 + hi2), 0.5 * (hi2 - lo2));

        let mut logs = Vec::with_capacity(x1.len() * x2.len());
        let mut phis = Vec::with_capacity(x1.len() * x2.len());
        let mut wts = Vec::with_capacity(x1.len() * x2.len());
        for (i, &xi) in x1.iter().enumerate() {
            let z1 = c1 + h1 * xi;
            for (j, &xj) in x2.iter().enumerate() {
                let z2 = c2 + h2 * xj;
                let alpha = center_point[0] + scale[0][0] * z1;
                let v = center_point[1] + scale[1][0] * z1 + scale[1][1] * z2;
                logs.push(log_integrand(alpha, v));
                phis.push(phi_raw(alpha, v.exp(), n));
                wts.push(w1[i] * w2[j]);
            }
        }
        let s =
            *shift.get_or_insert_with(|| logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
        let mut num = 0.0;
        let mut den = 0.0;
        for ((lg, phi), wt) in logs.iter().zip(&phis).zip(&wts) {
            if !lg.is_finite() {
                continue;
            }
            let g = (lg - s).exp() * wt;
            num += g * phi;
            den += g;
        }
        (num * h1 * h2, den * h1 * h2, m1.max(m2))
    };

    // Widen until the captured mass stabilizes (the box stops growing once
    // it covers the support, at which point mass change is exactly zero).
    let mut width = opts.initial_halfwidth;
    let (_, mut mass, _) = eval(width, 1);
    for _ in 0..opts.max_widenings {
        let wider = width * 1.5;
        let (_, mass_wide, _) = eval(wider, 1);
        let change = (mass_wide - mass).abs();
        width = wider;
        mass = mass_wide;
        if mass > 0.0 && change < opts.mass_tol * mass {
            break;
        }
    }
    if mass <= 0.0 {
        return Err(Error::PriorOutsideRegion);
    }

    // Refine at the final width until the value stabilizes.
    let mut refine = 1usize;
    let (num, den, mut nodes_used) = eval(width, refine);
    let mut value = num / den;
    let mut error = f64::INFINITY;
    let mut converged = false;
    while nodes_used * 2 < opts.max_nodes {
        refine *= 2;
        let (num, den, m) = eval(width, refine);
        nodes_used = m;
        let refined = num / den;
        error = (refined - value).abs();
        value = refined;
        if error <= opts.value_tol * value.abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }
    // Factor of two so the next halving stays within the estimate.
    let error_estimate = (2.0 * error).max(4.0 * f64::EPSILON * value.abs());

    Ok(PhiPosterior {
        value,
        error_estimate,
        converged,
        nodes_per_axis: nodes_used,
        halfwidth: width,
    })
}

/// Node-placement frame: center and axis scales in the integration
/// coordinates `(alpha, v = ln theta)`.
///
/// Interior fits use the MLE with the Cholesky factor of the inverse
/// observed information mapped through the Jacobian of `theta = e^v`;
/// anything else (boundary fits, singular curvature, a fit outside the
/// support) gets a center clamped into the prior's support with
/// deliberately wide diagonal scales.
fn studentizing_frame(prior: &Hyperprior, center: &MleResult) -> ([f64; 2], [[f64; 2]; 2]) {
    if center.is_interior() && center.theta_hat > 1e-6 {
        let v_hat = center.theta_hat.ln();
        // F_v = J' F J with J = d(alpha, theta)/d(alpha, v).
        let jac = [[1.0, 0.0], [0.0, center.theta_hat]];
        let fisher_v = mat2::congruence(jac, center.observed_fisher);
        if let Some(chol) = mat2::inverse(fisher_v).and_then(mat2::cholesky) {
            return ([center.alpha_hat, v_hat], chol);
        }
    }
    let (a_lo, a_hi, t_lo, t_hi) = prior.support_box();
    let a_span = (a_hi - a_lo).max(1e-6);
    let alpha0 = center
        .alpha_hat
        .clamp(a_lo + 0.02 * a_span, a_hi - 0.02 * a_span)
        .clamp(0.01, 0.99);
    let theta_cap = if t_hi.is_finite() { t_hi } else { 1e6 };
    let theta0 = center.theta_hat.clamp((t_lo + 1e-3).max(1e-3), theta_cap);
    let sd_alpha = 0.25;
    let sd_v = 1.0;
    ([alpha0, theta0.ln()], [[sd_alpha, 0.0], [0.0, sd_v]])
}

/// a - b treating infinities as saturating.
fn sub_inf(a: f64, b: f64) -> f64 {
    if a.is_infinite() {
        a
    } else if b.is_infinite() {
        -b
    } else {
        a - b
    }
}
