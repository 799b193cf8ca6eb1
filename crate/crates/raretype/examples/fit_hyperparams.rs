//! Fit the discount and concentration to a synthetic partition with known
//! parameters, then turn the fit into a plug-in likelihood ratio.

use raretype::inference::{lr_plugin, mle_fit};
use raretype::pyp::{crp_sample, HyperParams};
use raretype::Seed;

fn main() -> raretype::Result<()> {
    let truth = HyperParams::new(0.5, 20.0)?;
    let n = 50_000;
    let partition = crp_sample(n, &truth, Seed(11))?;
    println!(
        "sampled n = {n}: {} blocks, {} singletons",
        partition.num_blocks(),
        partition.singleton_count()
    );

    let fit = mle_fit(&partition.to_integer_partition())?;
    println!(
        "\nfit: alpha = {:.4}, theta = {:.2}",
        fit.alpha_hat, fit.theta_hat
    );
    println!(
        "     converged = {}, boundary = {}, restarts = {}",
        fit.converged, fit.boundary, fit.n_restarts_used
    );
    println!("     observed information: {:?}", fit.observed_fisher);
    println!("     (alpha is estimable; theta is not, so expect it to wander)");

    let lr = lr_plugin(n, &fit)?;
    println!("\nplug-in likelihood ratio at n = {n}: {lr:.1}");
    println!(
        "at the true parameters it would be {:.1}",
        (n as f64 + 1.0 + 20.0) / 0.5
    );
    Ok(())
}
