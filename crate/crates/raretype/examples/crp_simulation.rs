//! Sample a population-scale seating plan and look at its ranked block
//! sizes, the observable the model-fit study compares against data.

use raretype::partition::IntegerPartition;
use raretype::pyp::{crp_counts, log_eppf, HyperParams};
use raretype::Seed;

fn main() -> raretype::Result<()> {
    let h = HyperParams::new(0.5, 216.0)?;
    let n = 18_925;
    let mut counts = crp_counts(n, &h, Seed(7))?;
    counts.sort_unstable_by(|a, b| b.cmp(a));

    println!("n = {n}, distinct types = {}", counts.len());
    println!("top ranked relative frequencies:");
    for (rank, &c) in counts.iter().take(10).enumerate() {
        println!(
            "  rank {:2}: {:.5}  (count {})",
            rank + 1,
            c as f64 / n as f64,
            c
        );
    }
    let singletons = counts.iter().filter(|&&c| c == 1).count();
    println!(
        "singleton types: {singletons} ({:.1}% of types)",
        100.0 * singletons as f64 / counts.len() as f64
    );

    let part = IntegerPartition::from_block_sizes(
        &counts.iter().map(|&c| c as usize).collect::<Vec<_>>(),
    )?;
    println!(
        "log probability of this partition: {:.2}",
        log_eppf(&part, &h)
    );
    Ok(())
}
