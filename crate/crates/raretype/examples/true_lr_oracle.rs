//! The known-frequency likelihood ratio: chain estimate versus exact
//! enumeration on a tiny instance, and the uniform-population closed form.

use raretype::oracle::{true_lr, true_lr_exhaustive, MhConfig, PopulationFreqs};
use raretype::partition::IntegerPartition;
use raretype::Seed;

fn main() -> raretype::Result<()> {
    // Eight types with skewed frequencies; a sample of six observations
    // containing one pair and four singletons (one of them the suspect).
    let p = PopulationFreqs::from_weights(vec![0.45, 0.2, 0.12, 0.09, 0.06, 0.04, 0.03, 0.01])?;
    let part = IntegerPartition::new(vec![1, 2], vec![4, 1])?;

    let exact = true_lr_exhaustive(&p, &part)?;
    let chain = true_lr(&p, &part, &MhConfig::new(1_000_000, Seed(2)))?;
    println!("tiny instance (M = {}, n+1 = {}):", p.len(), part.n());
    println!("  exhaustive: lr = {exact:.6}");
    println!(
        "  chain:      lr = {:.6} +- {:.6}",
        chain.lr, chain.mc_std_error
    );
    println!("  acceptance rate: {:.3}", chain.estimate.acceptance_rate);

    // Uniform population of M types: the ratio is exactly M.
    for m in [10, 1000] {
        let uniform = PopulationFreqs::uniform(m)?;
        let out = true_lr(&uniform, &part, &MhConfig::new(50_000, Seed(3)))?;
        println!("uniform population of {m} types: lr = {}", out.lr);
    }
    Ok(())
}
