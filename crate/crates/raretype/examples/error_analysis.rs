//! A compact error analysis: generate populations from the model, treat
//! their empirical frequencies as the whole truth, and compare the
//! Bayesian ratio (fitted on small subsamples) with the known-frequency
//! one, replicate by replicate.

use raretype::experiments::{run_test2, ExperimentName, ExperimentSpec, PopulationSource};
use raretype::Seed;

fn main() -> raretype::Result<()> {
    let mut spec = ExperimentSpec::new(
        ExperimentName::Test2,
        PopulationSource::Synthetic {
            alpha: 0.5,
            theta: 216.0,
        },
        std::env::temp_dir().join("raretype_error_analysis"),
    );
    spec.n_population = 2_085;
    spec.n_sample = 100;
    spec.n_replicates = 20; // the full study uses 100 x 5
    spec.n_populations = 2;
    spec.mh_iterations = 100_000;
    spec.seed = Seed(42);

    let (rows, skipped) = run_test2(&spec)?;
    println!("pop rep   log10(true)  log10(bayes)  error");
    for row in &rows {
        println!(
            "{:>3} {:>3}   {:>10.4}  {:>11.4}  {:+.4}",
            row.population_id,
            row.replicate_id,
            row.log10_lr_true,
            row.log10_lr_bayes,
            row.log10_error
        );
    }
    let mut abs_errors: Vec<f64> = rows.iter().map(|r| r.log10_error.abs()).collect();
    abs_errors.sort_by(|a, b| a.partial_cmp(b).unwrap());
    println!(
        "\nreplicates: {} ({} skipped), median |log10 error| = {:.4}",
        rows.len(),
        skipped.len(),
        abs_errors[abs_errors.len() / 2]
    );
    Ok(())
}
