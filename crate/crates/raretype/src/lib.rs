//! Likelihood ratios for rare type matches under a Bayesian nonparametric
//! population model.
//!
//! The population frequency vector of a discrete characteristic (for
//! example Y-STR profiles) is given a two-parameter Poisson-Dirichlet
//! prior. Because profile names carry no information under the model, a
//! reference database reduces to the partition of its row indexes by
//! profile equality; appending the suspect as a new singleton and joining
//! the matching trace to it captures the whole rare-type match problem in
//! three nested partitions. The likelihood ratio follows from the partition
//! law alone, and when the population frequencies are actually known, an
//! independent "true" likelihood ratio is available for calibration.
//!
//! Module map:
//!
//! - [`partition`] — set/integer partitions, database ingestion.
//! - [`pyp`] — partition probabilities, seating-plan sampler,
//!   stick-breaking, growth diagnostics.
//! - [`inference`] — hyperparameter MLE, posterior expectation of the
//!   match probability, Bayesian and plug-in likelihood ratios,
//!   log-likelihood surfaces.
//! - [`oracle`] — known-frequency ("true") likelihood ratio via a
//!   Metropolis-Hastings sampler over latent assignments, with an
//!   exhaustive cross-check for tiny instances.
//! - [`experiments`] — model-fit and error-analysis studies emitting CSV.
//! - [`cli`] — the `raretype` command-line entry point.
//!
//! Each capability has a runnable example:
//!
//! ```bash
//! cargo run --example partition_pipeline
//! cargo run --example crp_simulation
//! cargo run --example stick_breaking
//! cargo run --example growth_diagnostics
//! cargo run --example fit_hyperparams
//! cargo run --example likelihood_ratio
//! cargo run --example true_lr_oracle
//! cargo run --example loglik_surface
//! cargo run --example error_analysis
//! ```

pub mod cli;
pub mod error;
pub mod experiments;
pub mod inference;
pub mod math;
pub mod oracle;
pub mod partition;
pub mod pyp;
pub mod seed;

pub use error::{Error, Result};
pub use seed::Seed;
