//! Relative log-likelihood surface around the fit, with the Gaussian
//! comparison sheet, in both parametrizations.

use raretype::inference::{
    loglik_surface, mle_fit, GridSpec, SurfaceCoords, CONTOUR_LEVEL_95, CONTOUR_LEVEL_99,
};
use raretype::pyp::{crp_sample, HyperParams};
use raretype::Seed;

fn main() -> raretype::Result<()> {
    let h = HyperParams::new(0.5, 216.0)?;
    let p_plus = crp_sample(18_925, &h, Seed(4))?.extend_with_suspect();
    let part = p_plus.to_integer_partition();
    let n = p_plus.n() - 1;

    let fit = mle_fit(&part)?;
    println!(
        "fit: alpha = {:.4}, theta = {:.1}",
        fit.alpha_hat, fit.theta_hat
    );
    println!(
        "contour levels (rel loglik): 95% at {CONTOUR_LEVEL_95:.3}, 99% at {CONTOUR_LEVEL_99:.3}\n"
    );

    for coords in [SurfaceCoords::AlphaTheta, SurfaceCoords::PhiTheta] {
        let grid = GridSpec::centered_on(&fit, coords, n, 3.0, 7)?;
        let rows = loglik_surface(&part, &grid, &fit)?;
        println!("{coords:?}: param1,param2,rel_loglik,gaussian_rel_loglik");
        for row in rows.iter().step_by(8) {
            println!(
                "  {:.6},{:.3},{:.4},{:.4}",
                row.param1, row.param2, row.rel_loglik, row.gaussian_rel_loglik
            );
        }
        println!();
    }
    Ok(())
}
