//! End-to-end studies: model fit against ranked frequencies, likelihood
//! surfaces, and the three error analyses comparing the Bayesian ratio to
//! the known-frequency one on populations where the truth is available.
//!
//! Every experiment is a pure function of its spec (seed included): reruns
//! are byte-identical, replicates parallelize over split seeds, and output
//! rows are ordered by (population, replicate) regardless of scheduling.

use std::collections::HashSet;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::inference::{
    loglik_surface, lr_bayes_with, mle_fit, GridSpec, Hyperprior, MleOptions, MleResult,
    QuadratureOptions, SurfaceCoords, SurfaceRow, CONTOUR_LEVEL_95, CONTOUR_LEVEL_99,
};
use crate::oracle::{true_lr, MhConfig, PopulationFreqs};
use crate::partition::{ingest_database, IngestOptions, IntegerPartition, SetPartition};
use crate::pyp::{crp_assignments, crp_counts, HyperParams};
use crate::seed::Seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentName {
    ModelFit,
    Surface,
    Test1,
    Test2,
    Test3,
}

impl ExperimentName {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentName::ModelFit => "model_fit",
            ExperimentName::Surface => "surface",
            ExperimentName::Test1 => "test1",
            ExperimentName::Test2 => "test2",
            ExperimentName::Test3 => "test3",
        }
    }
}

/// Where the population (or source partition) comes from.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PopulationSource {
    /// TSV profile database; the population is its rows.
    Database {
        path: PathBuf,
        loci: Vec<String>,
        /// Optional (column, value) row filter, e.g. a location column.
        filter: Option<(String, String)>,
    },
    /// A seating-plan run of `n_population` customers at these parameters.
    Synthetic { alpha: f64, theta: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSpec {
    pub name: ExperimentName,
    pub source: PopulationSource,
    pub n_population: usize,
    pub n_sample: usize,
    pub n_replicates: usize,
    /// Independent populations (tests 2 and 3); 1 elsewhere.
    pub n_populations: usize,
    pub seed: Seed,
    pub output_dir: PathBuf,
    /// Hyperprior for the Bayesian ratio (tests 1 and 2).
    pub prior: Hyperprior,
    /// Chain length for the known-frequency ratio.
    pub mh_iterations: usize,
    /// Grid steps per axis for surfaces.
    pub grid_steps: usize,
}

impl ExperimentSpec {
    pub fn new(name: ExperimentName, source: PopulationSource, output_dir: PathBuf) -> Self {
        ExperimentSpec {
            name,
            source,
            n_population: 2085,
            n_sample: 100,
            n_replicates: 100,
            n_populations: if matches!(name, ExperimentName::Test2 | ExperimentName::Test3) {
                5
            } else {
                1
            },
            seed: Seed(0),
            output_dir,
            prior: Hyperprior::default_diffuse(),
            mh_iterations: 200_000,
            grid_steps: 41,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_sample > self.n_population {
            return Err(Error::Config(format!(
                "sample size {} exceeds population size {}",
                self.n_sample, self.n_population
            )));
        }
        if self.n_replicates == 0 || self.n_populations == 0 {
            return Err(Error::Config("need at least one replicate".into()));
        }
        Ok(())
    }
}

/// One replicate of a truth-vs-estimate comparison.
#[derive(Debug, Clone, Serialize)]
pub struct LrComparisonRow {
    pub population_id: usize,
    pub replicate_id: usize,
    pub log10_lr_true: f64,
    pub log10_lr_bayes: f64,
    /// log10_lr_true - log10_lr_bayes.
    pub log10_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SkippedReplicate {
    pub population_id: usize,
    pub replicate_id: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RankedFrequencyRow {
    pub series: String,
    pub rank: usize,
    pub rel_freq: f64,
}

/// Outcome of a file-emitting run.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub experiment: &'static str,
    pub files: Vec<PathBuf>,
    pub rows_emitted: usize,
    pub replicates_skipped: usize,
}

/// How the estimated ratio is computed in a comparison test.
enum LrMode<'a> {
    /// Fit and integrate under the hyperprior (tests 1 and 2).
    Posterior(&'a Hyperprior),
    /// Closed form at known parameters (test 3).
    ClosedForm { alpha: f64, theta: f64 },
}

/// Model-fit study: ranked source frequencies, replicate curves sampled at
/// the fitted parameters, and the fitted power-law reference line.
pub fn run_model_fit(spec: &ExperimentSpec) -> Result<(Vec<RankedFrequencyRow>, MleResult)> {
    spec.validate()?;
    let source_sizes = source_block_sizes(spec)?;
    let n: usize = source_sizes.iter().map(|&s| s as usize).sum();
    let part = IntegerPartition::from_block_sizes(
        &source_sizes.iter().map(|&s| s as usize).collect::<Vec<_>>(),
    )?;
    let fit = mle_fit(&part)?;

    let mut rows = Vec::new();
    push_ranked_series(&mut rows, "source", &source_sizes, n);

    let h = HyperParams::new(fit.alpha_hat, fit.theta_hat)?;
    for r in 0..spec.n_replicates {
        let counts = crp_counts(n, &h, spec.seed.child(1_000 + r as u64))?;
        push_ranked_series(&mut rows, &format!("fit_{:03}", r + 1), &counts, n);
    }

    // Reference line with the fitted tail exponent, anchored to the source
    // curve at a fixed small rank.
    let mut ranked: Vec<u64> = source_sizes.clone();
    ranked.sort_unstable_by(|a, b| b.cmp(a));
    let k = ranked.len();
    let anchor = k.min(10);
    let slope = -1.0 / fit.alpha_hat;
    let c = (ranked[anchor - 1] as f64 / n as f64) / (anchor as f64).powf(slope);
    for rank in 1..=k {
        rows.push(RankedFrequencyRow {
            series: "powerlaw".into(),
            rank,
            rel_freq: c * (rank as f64).powf(slope),
        });
    }
    Ok((rows, fit))
}

fn push_ranked_series(rows: &mut Vec<RankedFrequencyRow>, series: &str, sizes: &[u64], n: usize) {
    let mut ranked: Vec<u64> = sizes.to_vec();
    ranked.sort_unstable_by(|a, b| b.cmp(a));
    for (i, &s) in ranked.iter().enumerate() {
        rows.push(RankedFrequencyRow {
            series: series.to_string(),
            rank: i + 1,
            rel_freq: s as f64 / n as f64,
        });
    }
}

/// Both likelihood surfaces for the suspect-extended source partition.
pub fn run_surface(spec: &ExperimentSpec) -> Result<(Vec<SurfaceRow>, Vec<SurfaceRow>, MleResult)> {
    spec.validate()?;
    let sizes = source_block_sizes(spec)?;
    let mut block_sizes: Vec<usize> = sizes.iter().map(|&s| s as usize).collect();
    block_sizes.push(1); // the suspect's new singleton
    let part_plus = IntegerPartition::from_block_sizes(&block_sizes)?;
    let n = part_plus.n() - 1;
    let fit = mle_fit(&part_plus)?;
    let alpha_grid =
        GridSpec::centered_on(&fit, SurfaceCoords::AlphaTheta, n, 4.0, spec.grid_steps)?;
    let phi_grid = GridSpec::centered_on(&fit, SurfaceCoords::PhiTheta, n, 4.0, spec.grid_steps)?;
    let alpha_rows = loglik_surface(&part_plus, &alpha_grid, &fit)?;
    let phi_rows = loglik_surface(&part_plus, &phi_grid, &fit)?;
    Ok((alpha_rows, phi_rows, fit))
}

/// Test 1: a real (or user-supplied) population is treated as exhaustive.
pub fn run_test1(spec: &ExperimentSpec) -> Result<(Vec<LrComparisonRow>, Vec<SkippedReplicate>)> {
    spec.validate()?;
    let labels = population_from_source(spec)?;
    run_lr_comparison(spec, &[labels], LrMode::Posterior(&spec.prior))
}

/// Test 2: populations are seating-plan runs at the spec's parameters, so
/// the model is exactly right and only estimation error remains.
pub fn run_test2(spec: &ExperimentSpec) -> Result<(Vec<LrComparisonRow>, Vec<SkippedReplicate>)> {
    spec.validate()?;
    let populations = synthetic_populations(spec)?;
    run_lr_comparison(spec, &populations, LrMode::Posterior(&spec.prior))
}

/// Test 3: as test 2, but the estimated ratio uses the generating
/// parameters directly (no fitting, no hyperprior).
pub fn run_test3(spec: &ExperimentSpec) -> Result<(Vec<LrComparisonRow>, Vec<SkippedReplicate>)> {
    spec.validate()?;
    let PopulationSource::Synthetic { alpha, theta } = spec.source else {
        return Err(Error::Config(
            "test3 needs a synthetic source: its ratio uses the generating parameters".into(),
        ));
    };
    let populations = synthetic_populations(spec)?;
    run_lr_comparison(spec, &populations, LrMode::ClosedForm { alpha, theta })
}

fn synthetic_populations(spec: &ExperimentSpec) -> Result<Vec<Vec<u32>>> {
    let PopulationSource::Synthetic { alpha, theta } = spec.source else {
        return Err(Error::Config(
            "this experiment needs a synthetic source".into(),
        ));
    };
    let h = HyperParams::new(alpha, theta)?;
    (0..spec.n_populations)
        .map(|p| crp_assignments(spec.n_population, &h, spec.seed.child(p as u64)))
        .collect()
}

fn population_from_source(spec: &ExperimentSpec) -> Result<Vec<u32>> {
    match &spec.source {
        PopulationSource::Database { path, loci, filter } => {
            let opts = IngestOptions {
                loci: loci.clone(),
                row_filter: filter.clone(),
                ..IngestOptions::default()
            };
            let (_, partition) = ingest_database(path, &opts)?;
            let mut labels = vec![0u32; partition.n()];
            for (b, block) in partition.blocks().iter().enumerate() {
                for &e in block {
                    labels[e - 1] = b as u32;
                }
            }
            Ok(labels)
        }
        PopulationSource::Synthetic { alpha, theta } => {
            let h = HyperParams::new(*alpha, *theta)?;
            crp_assignments(spec.n_population, &h, spec.seed.child(0))
        }
    }
}

fn run_lr_comparison(
    spec: &ExperimentSpec,
    populations: &[Vec<u32>],
    mode: LrMode<'_>,
) -> Result<(Vec<LrComparisonRow>, Vec<SkippedReplicate>)> {
    let mode = &mode;
    let outcomes: Vec<(usize, usize, std::result::Result<LrComparisonRow, String>)> = populations
        .par_iter()
        .enumerate()
        .flat_map_iter(|(pop_id, labels)| {
            let freqs = population_freqs(labels);
            (0..spec.n_replicates).map(move |rep| {
                let seed = spec
                    .seed
                    .child(0x5eed_0000 + pop_id as u64)
                    .child(rep as u64);
                let outcome = comparison_replicate(
                    labels,
                    &freqs,
                    spec.n_sample,
                    spec.mh_iterations,
                    mode,
                    seed,
                );
                (pop_id + 1, rep + 1, outcome)
            })
        })
        .collect();

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (population_id, replicate_id, outcome) in outcomes {
        match outcome {
            Ok(mut row) => {
                row.population_id = population_id;
                row.replicate_id = replicate_id;
                rows.push(row);
            }
            Err(reason) => skipped.push(SkippedReplicate {
                population_id,
                replicate_id,
                reason,
            }),
        }
    }
    rows.sort_by_key(|r| (r.population_id, r.replicate_id));
    skipped.sort_by_key(|s| (s.population_id, s.replicate_id));
    Ok((rows, skipped))
}

fn population_freqs(labels: &[u32]) -> PopulationFreqs {
    PopulationFreqs::from_counts(&count_labels(labels)).expect("non-empty population")
}

fn comparison_replicate(
    labels: &[u32],
    freqs: &PopulationFreqs,
    n_sample: usize,
    mh_iterations: usize,
    mode: &LrMode<'_>,
    seed: Seed,
) -> std::result::Result<LrComparisonRow, String> {
    let mut rng = seed.rng();
    let sample_idx = sample_without_replacement(labels.len(), n_sample, &mut rng);
    let sample_labels: Vec<u32> = sample_idx.iter().map(|&i| labels[i]).collect();
    let seen: HashSet<u32> = sample_labels.iter().copied().collect();

    // The suspect's type comes from the population restricted to types the
    // subsample missed, drawn with population weights by rejection.
    let mut suspect_found = false;
    for _ in 0..32 * labels.len().max(32) {
        let i = rng.random_range(0..labels.len());
        if !seen.contains(&labels[i]) {
            suspect_found = true;
            break;
        }
    }
    if !suspect_found {
        if labels.iter().any(|l| !seen.contains(l)) {
            return Err("suspect rejection sampling exhausted its attempt budget".into());
        }
        return Err("no rare type constructible: subsample exhausts the population's types".into());
    }

    let partition = SetPartition::from_labels(&sample_labels).map_err(|e| e.to_string())?;
    let p_plus = partition.extend_with_suspect();
    let part_plus = p_plus.to_integer_partition();
    let n = partition.n();

    let cfg = MhConfig::new(mh_iterations, seed.child(1));
    let lr_true = true_lr(freqs, &part_plus, &cfg).map_err(|e| e.to_string())?;

    let lr_estimate = match mode {
        LrMode::Posterior(prior) => {
            // log10-scale comparisons need nothing like the default value
            // tolerance; trading it away caps the per-replicate node count.
            let quad = QuadratureOptions {
                value_tol: 1e-7,
                max_nodes: 700,
                ..QuadratureOptions::default()
            };
            let report = lr_bayes_with(&p_plus, prior, &MleOptions::default(), &quad)
                .map_err(|e| e.to_string())?;
            report.lr_bayes
        }
        LrMode::ClosedForm { alpha, theta } => (n as f64 + 1.0 + theta) / (1.0 - alpha),
    };

    Ok(LrComparisonRow {
        population_id: 0,
        replicate_id: 0,
        log10_lr_true: lr_true.lr.log10(),
        log10_lr_bayes: lr_estimate.log10(),
        log10_error: lr_true.lr.log10() - lr_estimate.log10(),
    })
}

/// First `k` entries of a partial Fisher-Yates shuffle of `0..n`.
fn sample_without_replacement<R: Rng>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    debug_assert!(k <= n);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}

fn source_block_sizes(spec: &ExperimentSpec) -> Result<Vec<u64>> {
    match &spec.source {
        PopulationSource::Database { .. } => {
            let labels = population_from_source(spec)?;
            Ok(count_labels(&labels))
        }
        PopulationSource::Synthetic { alpha, theta } => {
            let h = HyperParams::new(*alpha, *theta)?;
            crp_counts(spec.n_population, &h, spec.seed.child(0))
        }
    }
}

fn count_labels(labels: &[u32]) -> Vec<u64> {
    let k = labels.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut counts = vec![0u64; k];
    for &l in labels {
        counts[l as usize] += 1;
    }
    counts
}

/// Run the named experiment and write its CSV output plus a JSON manifest
/// under the spec's output directory. Outputs carry no timestamps, so a
/// rerun with the same spec is byte-identical.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunSummary> {
    fs::create_dir_all(&spec.output_dir)?;
    let mut files = Vec::new();
    let manifest_extra;
    let (rows_emitted, replicates_skipped) = match spec.name {
        ExperimentName::ModelFit => {
            let (rows, fit) = run_model_fit(spec)?;
            let path = spec.output_dir.join("model_fit.csv");
            write_csv(&path, "series,rank,rel_freq", &rows, |r| {
                format!("{},{},{}", r.series, r.rank, r.rel_freq)
            })?;
            files.push(path);
            manifest_extra = json!({ "mle": fit });
            (rows.len(), 0)
        }
        ExperimentName::Surface => {
            let (alpha_rows, phi_rows, fit) = run_surface(spec)?;
            let header = "param1,param2,rel_loglik,gaussian_rel_loglik";
            let fmt = |r: &SurfaceRow| {
                format!(
                    "{},{},{},{}",
                    r.param1, r.param2, r.rel_loglik, r.gaussian_rel_loglik
                )
            };
            let alpha_path = spec.output_dir.join("surface_alpha_theta.csv");
            write_csv(&alpha_path, header, &alpha_rows, fmt)?;
            let phi_path = spec.output_dir.join("surface_phi_theta.csv");
            write_csv(&phi_path, header, &phi_rows, fmt)?;
            let count = alpha_rows.len() + phi_rows.len();
            files.push(alpha_path);
            files.push(phi_path);
            manifest_extra = json!({
                "mle": fit,
                "contour_levels": {
                    "p95_rel_loglik": CONTOUR_LEVEL_95,
                    "p99_rel_loglik": CONTOUR_LEVEL_99,
                },
            });
            (count, 0)
        }
        ExperimentName::Test1 | ExperimentName::Test2 | ExperimentName::Test3 => {
            let (rows, skipped) = match spec.name {
                ExperimentName::Test1 => run_test1(spec)?,
                ExperimentName::Test2 => run_test2(spec)?,
                _ => run_test3(spec)?,
            };
            let path = spec.output_dir.join(format!("{}.csv", spec.name.as_str()));
            write_csv(
                &path,
                "population,replicate,log10_lr_true,log10_lr_bayes,log10_error",
                &rows,
                |r| {
                    format!(
                        "{},{},{},{},{}",
                        r.population_id,
                        r.replicate_id,
                        r.log10_lr_true,
                        r.log10_lr_bayes,
                        r.log10_error
                    )
                },
            )?;
            files.push(path);
            manifest_extra = json!({ "skipped_replicates": skipped });
            (rows.len(), skipped.len())
        }
    };

    let manifest = json!({
        "experiment": spec.name.as_str(),
        "version": env!("CARGO_PKG_VERSION"),
        "seed": spec.seed,
        "spec": spec,
        "rows_emitted": rows_emitted,
        "replicates_skipped": replicates_skipped,
        "extra": manifest_extra,
    });
    let manifest_path = spec.output_dir.join("manifest.json");
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;
    files.push(manifest_path);

    Ok(RunSummary {
        experiment: spec.name.as_str(),
        files,
        rows_emitted,
        replicates_skipped,
    })
}

fn write_csv<T>(
    path: &Path,
    header: &str,
    rows: &[T],
    format_row: impl Fn(&T) -> String,
) -> Result<()> {
    let mut out = fs::File::create(path)?;
    writeln!(out, "{header}")?;
    for row in rows {
        writeln!(out, "{}", format_row(row))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::median;

    fn synthetic_spec(name: ExperimentName, dir: &Path) -> ExperimentSpec {
        let mut spec = ExperimentSpec::new(
            name,
            PopulationSource::Synthetic {
                alpha: 0.5,
                theta: 20.0,
            },
            dir.to_path_buf(),
        );
        spec.n_population = 400;
        spec.n_sample = 50;
        spec.n_replicates = 8;
        spec.n_populations = 2;
        spec.mh_iterations = 20_000;
        spec.seed = Seed(7);
        spec
    }

    #[test]
    fn model_fit_series_are_normalized_and_monotone() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = synthetic_spec(ExperimentName::ModelFit, dir.path());
        spec.n_population = 3_000;
        spec.n_replicates = 3;
        let (rows, fit) = run_model_fit(&spec).unwrap();
        assert!(fit.is_interior());
        for series in ["source", "fit_001", "fit_002", "fit_003"] {
            let freqs: Vec<f64> = rows
                .iter()
                .filter(|r| r.series == series)
                .map(|r| r.rel_freq)
                .collect();
            assert!(!freqs.is_empty(), "missing series {series}");
            assert!(
                freqs.windows(2).all(|w| w[0] >= w[1]),
                "{series} not ranked"
            );
            let total: f64 = freqs.iter().sum();
            assert!((total - 1.0).abs() < 1e-9, "{series} sums to {total}");
        }
        assert!(rows.iter().any(|r| r.series == "powerlaw"));
    }

    /// Self-consistency of the generative story: replicate curves sampled
    /// at the fitted parameters bracket the source curve over the leading
    /// ranks most of the time.
    #[test]
    fn model_fit_replicates_bracket_the_source() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = synthetic_spec(ExperimentName::ModelFit, dir.path());
        spec.n_population = 5_000;
        spec.n_replicates = 20;
        let (rows, _) = run_model_fit(&spec).unwrap();
        let series = |name: &str| -> Vec<f64> {
            rows.iter()
                .filter(|r| r.series == name)
                .map(|r| r.rel_freq)
                .collect()
        };
        let source = series("source");
        let replicates: Vec<Vec<f64>> = (1..=20).map(|r| series(&format!("fit_{r:03}"))).collect();
        let max_rank = replicates
            .iter()
            .map(Vec::len)
            .min()
            .unwrap()
            .min(source.len())
            .min(100);
        let mut bracketed = 0;
        for rank in 0..max_rank {
            let lo = replicates.iter().map(|r| r[rank]).fold(f64::MAX, f64::min);
            let hi = replicates.iter().map(|r| r[rank]).fold(0.0, f64::max);
            if (lo..=hi).contains(&source[rank]) {
                bracketed += 1;
            }
        }
        assert!(
            bracketed as f64 >= 0.8 * max_rank as f64,
            "{bracketed}/{max_rank} ranks bracketed"
        );
    }

    #[test]
    fn test3_rows_share_one_closed_form_value() {
        let dir = tempfile::tempdir().unwrap();
        let spec = synthetic_spec(ExperimentName::Test3, dir.path());
        let (rows, skipped) = run_test3(&spec).unwrap();
        assert_eq!(rows.len() + skipped.len(), 16);
        // (50 + 1 + 20) / 0.5, shared by every replicate.
        let expect = (142.0f64).log10();
        for row in &rows {
            assert!((row.log10_lr_bayes - expect).abs() < 1e-12);
            assert!((row.log10_error - (row.log10_lr_true - row.log10_lr_bayes)).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_spot_value() {
        // n = 100 at (0.5, 20): (100 + 1 + 20) / 0.5 = 242.
        let lr = (100.0 + 1.0 + 20.0) / (1.0 - 0.5);
        assert_eq!(lr, 242.0);
    }

    #[test]
    fn uniform_population_test1_truth_is_log10_m() {
        use std::io::Write;
        // 12 individuals over 4 equally frequent types.
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "id\tL1").unwrap();
        for (i, t) in (0..12).map(|i| (i, i % 4)) {
            writeln!(f, "r{i}\tT{t}").unwrap();
        }
        let dir = tempfile::tempdir().unwrap();
        let mut spec = ExperimentSpec::new(
            ExperimentName::Test1,
            PopulationSource::Database {
                path: f.path().to_path_buf(),
                loci: vec!["L1".into()],
                filter: None,
            },
            dir.path().to_path_buf(),
        );
        spec.n_population = 12;
        spec.n_sample = 5;
        spec.n_replicates = 6;
        spec.n_populations = 1;
        spec.mh_iterations = 5_000;
        spec.seed = Seed(11);
        let (rows, skipped) = run_test1(&spec).unwrap();
        assert_eq!(rows.len() + skipped.len(), 6);
        for row in &rows {
            assert!(
                (row.log10_lr_true - 4f64.log10()).abs() < 1e-9,
                "log10 true {}",
                row.log10_lr_true
            );
        }
    }

    #[test]
    fn reruns_are_bit_identical_and_thread_independent() {
        let dir = tempfile::tempdir().unwrap();
        let spec = synthetic_spec(ExperimentName::Test2, dir.path());
        let (rows_a, skip_a) = run_test2(&spec).unwrap();
        let (rows_b, skip_b) = run_test2(&spec).unwrap();
        assert_eq!(
            serde_json::to_string(&rows_a).unwrap(),
            serde_json::to_string(&rows_b).unwrap()
        );
        assert_eq!(
            serde_json::to_string(&skip_a).unwrap(),
            serde_json::to_string(&skip_b).unwrap()
        );

        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let (rows_c, _) = pool.install(|| run_test2(&spec)).unwrap();
        assert_eq!(
            serde_json::to_string(&rows_a).unwrap(),
            serde_json::to_string(&rows_c).unwrap()
        );
    }

    #[test]
    fn model_matched_errors_are_small() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = synthetic_spec(ExperimentName::Test2, dir.path());
        spec.n_population = 600;
        spec.n_sample = 80;
        spec.n_replicates = 10;
        spec.n_populations = 1;
        spec.mh_iterations = 40_000;
        let (rows, _) = run_test2(&spec).unwrap();
        assert!(rows.len() >= 8);
        let errors: Vec<f64> = rows.iter().map(|r| r.log10_error.abs()).collect();
        assert!(
            median(&errors) < 0.6,
            "median |log10 error| {}",
            median(&errors)
        );
    }

    #[test]
    fn experiment_writer_emits_files_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let spec = synthetic_spec(ExperimentName::Test3, dir.path());
        let summary = run_experiment(&spec).unwrap();
        assert_eq!(summary.rows_emitted + summary.replicates_skipped, 16);
        let csv = fs::read_to_string(dir.path().join("test3.csv")).unwrap();
        assert!(csv.starts_with("population,replicate,log10_lr_true"));
        assert_eq!(csv.lines().count(), 1 + summary.rows_emitted);
        let manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap())
                .unwrap();
        assert_eq!(manifest["experiment"], "test3");
        assert_eq!(manifest["rows_emitted"], summary.rows_emitted);
    }

    #[test]
    fn spec_validation_rejects_oversampling() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = synthetic_spec(ExperimentName::Test2, dir.path());
        spec.n_sample = spec.n_population + 1;
        assert!(run_test2(&spec).is_err());
    }
}
