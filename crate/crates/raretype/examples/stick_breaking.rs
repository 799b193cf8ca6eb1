//! Draw a ranked frequency vector by stick breaking and check its tail
//! against the power law rank^(-1/alpha).

use raretype::pyp::{stick_breaking_sample, HyperParams};
use raretype::Seed;

fn main() -> raretype::Result<()> {
    let alpha = 0.5;
    let h = HyperParams::new(alpha, 1.0)?;
    let w = stick_breaking_sample(&h, 100_000, Seed(3))?;
    w.validate()?;

    let ranked = w.ranked();
    println!(
        "sticks: {}, residual mass: {:.3e}",
        w.truncation(),
        w.residual()
    );
    for rank in [1usize, 10, 100, 1_000, 10_000] {
        println!("  rank {:>6}: {:.4e}", rank, ranked[rank - 1]);
    }

    let slope = w.tail_slope(1_000, 10_000)?;
    println!(
        "tail slope over ranks [1e3, 1e4]: {slope:.3} (theory: {:.3})",
        -1.0 / alpha
    );
    println!("(larger concentrations push the power-law regime to deeper ranks)");
    Ok(())
}
