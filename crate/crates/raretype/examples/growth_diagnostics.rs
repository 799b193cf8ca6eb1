//! Watch the block-count and singleton-fraction limits take hold along a
//! single long seating-plan run: K_n / n^alpha settles to a (random)
//! constant while m_1(n) / K_n settles to alpha itself.

use raretype::pyp::{block_growth_diagnostics, HyperParams};
use raretype::Seed;

fn main() -> raretype::Result<()> {
    let alpha = 0.5;
    let h = HyperParams::new(alpha, 20.0)?;
    let trajectory = block_growth_diagnostics(&h, 1_000_000, Seed(1))?;

    println!("{:>9} {:>9} {:>12} {:>10}", "n", "K_n", "K_n/n^a", "m1/K_n");
    for point in &trajectory {
        println!(
            "{:>9} {:>9} {:>12.4} {:>10.4}",
            point.n, point.k, point.k_over_n_alpha, point.m1_over_k
        );
    }
    let last = trajectory.last().unwrap();
    println!(
        "\nsingleton fraction at n = {}: {:.4} (alpha = {alpha})",
        last.n, last.m1_over_k
    );
    Ok(())
}
