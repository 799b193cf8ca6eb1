//! Command-line entry point.
//!
//! One binary, five subcommands: `fit`, `lr`, `oracle`, `simulate`,
//! `experiment`. Every invocation honors `--seed` for full determinism and
//! writes a manifest (command, resolved configuration, seed, config hash,
//! tool version) next to its outputs; manifests carry no timestamps, so a
//! rerun with the same inputs is byte-identical at any `--threads` value.
//!
//! Exit codes: 0 success, 1 computation flagged (boundary fit,
//! non-converged quadrature), 2 usage or input error.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::{Error, Result};
use crate::experiments::{run_experiment, ExperimentName, ExperimentSpec, PopulationSource};
use crate::inference::{
    lr_bayes_with, mle_fit_with, Hyperprior, MleOptions, QuadratureOptions, ThetaPrior,
};
use crate::oracle::{
    estimate_singleton_mass_with_trace, true_lr, true_lr_exhaustive, MhConfig, PopulationFreqs,
};
use crate::partition::{ingest_database, IngestOptions, IntegerPartition, DEFAULT_LOCI};
use crate::pyp::{block_growth_diagnostics, crp_counts, stick_breaking_sample, HyperParams};
use crate::seed::Seed;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FLAGGED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser)]
#[command(
    name = "raretype",
    version,
    about = "Likelihood ratios for rare type matches under a Pitman-Yor partition model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Master seed for all randomness.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output directory; without it, results go to stdout only.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Key = value configuration file (prior, chain and quadrature knobs).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the discount and concentration to a profile database.
    Fit {
        /// Tab-separated profile database.
        #[arg(long)]
        db: PathBuf,
        /// Comma-separated locus columns (default: the 7-locus subset).
        #[arg(long)]
        loci: Option<String>,
        /// Exit 0 even if the fit is boundary-flagged.
        #[arg(long)]
        allow_boundary: bool,
    },
    /// Bayesian likelihood ratio for a new matching type against a database.
    Lr {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        loci: Option<String>,
        /// Hyperprior: diffuse | point:A,T | uniform:ALO,AHI,TLO,THI | exp:ALO,AHI,RATE
        #[arg(long)]
        prior: Option<String>,
    },
    /// Known-frequency ("true") likelihood ratio.
    Oracle {
        /// One frequency or count per line.
        #[arg(long)]
        freqs: PathBuf,
        /// Block-size classes: inline "a=1,2;r=4,1" or a JSON file path.
        #[arg(long)]
        partition: String,
        #[arg(long, default_value_t = 200_000)]
        iterations: usize,
        /// Exact enumeration instead of the chain (tiny instances only).
        #[arg(long)]
        exhaustive: bool,
        /// Also write the thinned chain trace as CSV (needs --out).
        #[arg(long)]
        trace: bool,
    },
    /// Sample from the model and emit CSV.
    Simulate {
        #[arg(value_enum)]
        kind: SimulateKind,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        /// Stick count for `sticks`.
        #[arg(long, default_value_t = 100_000)]
        trunc: usize,
    },
    /// Run a configured experiment end to end.
    Experiment {
        /// Key = value experiment description.
        #[arg(long)]
        spec: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SimulateKind {
    /// Seating-plan run; emits ranked block sizes.
    Crp,
    /// Stick-breaking weights plus residual mass.
    Sticks,
    /// Block-growth trajectory along one run.
    Diagnostics,
}

/// Parse arguments from the process environment and run; returns the exit
/// code. Clap itself exits with code 2 on usage errors.
pub fn run() -> i32 {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Ignore failure: the global pool can only be set once per process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match dispatch(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let config = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let seed = Seed(cli.seed);
    match &cli.command {
        Command::Fit {
            db,
            loci,
            allow_boundary,
        } => cmd_fit(cli, &config, db, loci.as_deref(), *allow_boundary),
        Command::Lr { db, loci, prior } => {
            cmd_lr(cli, &config, db, loci.as_deref(), prior.as_deref())
        }
        Command::Oracle {
            freqs,
            partition,
            iterations,
            exhaustive,
            trace,
        } => cmd_oracle(
            cli,
            &config,
            freqs,
            partition,
            *iterations,
            *exhaustive,
            *trace,
            seed,
        ),
        Command::Simulate {
            kind,
            n,
            alpha,
            theta,
            trunc,
        } => cmd_simulate(cli, *kind, *n, *alpha, *theta, *trunc, seed),
        Command::Experiment { spec } => cmd_experiment(cli, spec, seed),
    }
}

fn cmd_fit(
    cli: &Cli,
    config: &ConfigFile,
    db: &Path,
    loci: Option<&str>,
    allow_boundary: bool,
) -> Result<i32> {
    let opts = ingest_options(config, loci)?;
    let (_, partition) = ingest_database(db, &opts)?;
    let fit = mle_fit_with(&partition.to_integer_partition(), &config.mle_options()?)?;
    let payload = serde_json::to_value(&fit)?;
    emit(
        cli,
        "fit",
        &[("mle.json", &payload)],
        json!({ "db": db, "loci": opts.loci, "n": partition.n() }),
    )?;
    if fit.is_interior() || allow_boundary {
        Ok(EXIT_OK)
    } else {
        eprintln!(
            "fit flagged: converged = {}, boundary = {}",
            fit.converged, fit.boundary
        );
        Ok(EXIT_FLAGGED)
    }
}

fn cmd_lr(
    cli: &Cli,
    config: &ConfigFile,
    db: &Path,
    loci: Option<&str>,
    prior: Option<&str>,
) -> Result<i32> {
    let opts = ingest_options(config, loci)?;
    let (_, partition) = ingest_database(db, &opts)?;
    // The match is new by assumption: append the suspect as a fresh type.
    let p_plus = partition.extend_with_suspect();
    let prior = resolve_prior(config, prior)?;
    let report = lr_bayes_with(
        &p_plus,
        &prior,
        &config.mle_options()?,
        &config.quadrature_options()?,
    )?;
    let payload = serde_json::to_value(&report)?;
    emit(
        cli,
        "lr",
        &[("lr.json", &payload)],
        json!({ "db": db, "loci": opts.loci, "prior": prior, "n": report.n }),
    )?;
    if report.quadrature_converged {
        Ok(EXIT_OK)
    } else {
        eprintln!("lr flagged: quadrature did not meet its tolerance");
        Ok(EXIT_FLAGGED)
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_oracle(
    cli: &Cli,
    config: &ConfigFile,
    freqs: &Path,
    partition: &str,
    iterations: usize,
    exhaustive: bool,
    trace: bool,
    seed: Seed,
) -> Result<i32> {
    let p = PopulationFreqs::load(freqs)?;
    let part = parse_partition_spec(partition)?;
    let payload = if exhaustive {
        let lr = true_lr_exhaustive(&p, &part)?;
        json!({ "lr": lr, "mc_se": 0.0, "mode": "exhaustive", "seed": seed })
    } else {
        let mut cfg = MhConfig::new(iterations, seed);
        if let Some(burn) = config.mh_burn_in {
            cfg.burn_in = burn;
        }
        if let Some(thin) = config.mh_thinning {
            cfg.thinning = thin;
        }
        if trace {
            if let Some(dir) = &cli.out {
                let (_, draws) = estimate_singleton_mass_with_trace(&p, &part, &cfg)?;
                fs::create_dir_all(dir)?;
                let mut csv = String::from("sample,singleton_mass\n");
                for (i, d) in draws.iter().enumerate() {
                    csv.push_str(&format!("{},{}\n", i + 1, d));
                }
                fs::write(dir.join("trace.csv"), csv)?;
            } else {
                return Err(Error::Config("--trace needs --out".into()));
            }
        }
        let out = true_lr(&p, &part, &cfg)?;
        json!({
            "lr": out.lr,
            "mc_se": out.mc_std_error,
            "iterations": iterations,
            "seed": seed,
            "mode": "chain",
            "acceptance_rate": out.estimate.acceptance_rate,
        })
    };
    emit(
        cli,
        "oracle",
        &[("oracle.json", &payload)],
        json!({ "freqs": freqs, "partition": { "a": part.a(), "r": part.r() } }),
    )?;
    Ok(EXIT_OK)
}

fn cmd_simulate(
    cli: &Cli,
    kind: SimulateKind,
    n: usize,
    alpha: f64,
    theta: f64,
    trunc: usize,
    seed: Seed,
) -> Result<i32> {
    let h = HyperParams::new(alpha, theta)?;
    let (filename, csv) = match kind {
        SimulateKind::Crp => {
            let mut counts = crp_counts(n, &h, seed)?;
            counts.sort_unstable_by(|a, b| b.cmp(a));
            let mut csv = String::from("rank,size,rel_freq\n");
            for (i, &c) in counts.iter().enumerate() {
                csv.push_str(&format!("{},{},{}\n", i + 1, c, c as f64 / n as f64));
            }
            ("crp.csv", csv)
        }
        SimulateKind::Sticks => {
            let w = stick_breaking_sample(&h, trunc, seed)?;
            let mut csv = String::from("rank,weight\n");
            for (i, &x) in w.ranked().iter().enumerate() {
                csv.push_str(&format!("{},{}\n", i + 1, x));
            }
            csv.push_str(&format!("residual,{}\n", w.residual()));
            ("sticks.csv", csv)
        }
        SimulateKind::Diagnostics => {
            let traj = block_growth_diagnostics(&h, n, seed)?;
            let mut csv = String::from("n,k_n,k_over_n_alpha,m1_over_kn\n");
            for p in traj {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    p.n, p.k, p.k_over_n_alpha, p.m1_over_k
                ));
            }
            ("diagnostics.csv", csv)
        }
    };
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(filename);
            fs::write(&path, &csv)?;
            write_manifest(
                cli,
                dir,
                "simulate",
                json!({
                    "kind": format!("{kind:?}").to_lowercase(),
                    "n": n, "alpha": alpha, "theta": theta, "trunc": trunc,
                    "files": [path],
                }),
            )?;
        }
        None => print!("{csv}"),
    }
    Ok(EXIT_OK)
}

fn cmd_experiment(cli: &Cli, spec_path: &Path, seed: Seed) -> Result<i32> {
    let mut spec = parse_experiment_spec(spec_path)?;
    if cli.seed != 0 {
        spec.seed = seed;
    }
    if let Some(out) = &cli.out {
        spec.output_dir = out.clone();
    }
    let summary = run_experiment(&spec)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(EXIT_OK)
}

/// Write JSON payloads (and a manifest) to --out, always printing the
/// first payload to stdout.
fn emit(
    cli: &Cli,
    command: &str,
    payloads: &[(&str, &serde_json::Value)],
    inputs: serde_json::Value,
) -> Result<()> {
    if let Some((_, first)) = payloads.first() {
        println!("{}", serde_json::to_string_pretty(first)?);
    }
    if let Some(dir) = &cli.out {
        fs::create_dir_all(dir)?;
        let mut files = Vec::new();
        for (name, payload) in payloads {
            let path = dir.join(name);
            fs::write(&path, serde_json::to_string_pretty(payload)?)?;
            files.push(path);
        }
        let mut inputs = inputs;
        inputs["files"] = json!(files);
        write_manifest(cli, dir, command, inputs)?;
    }
    Ok(())
}

fn write_manifest(cli: &Cli, dir: &Path, command: &str, inputs: serde_json::Value) -> Result<()> {
    let config_blob = match &cli.config {
        Some(path) => fs::read_to_string(path).unwrap_or_default(),
        None => String::new(),
    };
    let manifest = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": cli.seed,
        "config_hash": format!("{:016x}", fnv1a(config_blob.as_bytes())),
        "inputs": inputs,
    });
    let mut f = fs::File::create(dir.join("manifest.json"))?;
    writeln!(f, "{}", serde_json::to_string_pretty(&manifest)?)?;
    Ok(())
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x1000_0000_01b3);
    }
    hash
}

fn ingest_options(config: &ConfigFile, loci: Option<&str>) -> Result<IngestOptions> {
    let mut opts = IngestOptions::default();
    if let Some(sep) = config.separator {
        opts.key_separator = sep;
    }
    let from_flag = loci.map(|s| {
        s.split(',')
            .map(|x| x.trim().to_string())
            .filter(|x| !x.is_empty())
            .collect::<Vec<_>>()
    });
    if let Some(loci) = from_flag.or_else(|| config.loci.clone()) {
        if loci.is_empty() {
            return Err(Error::Config("empty locus list".into()));
        }
        opts.loci = loci;
    }
    Ok(opts)
}

fn resolve_prior(config: &ConfigFile, flag: Option<&str>) -> Result<Hyperprior> {
    match flag.or(config.prior.as_deref()) {
        Some(spec) => parse_prior_spec(spec),
        None => Ok(Hyperprior::default_diffuse()),
    }
}

/// diffuse | point:A,T | uniform:ALO,AHI,TLO,THI | exp:ALO,AHI,RATE
pub fn parse_prior_spec(spec: &str) -> Result<Hyperprior> {
    let bad = |msg: &str| Error::Config(format!("prior spec '{spec}': {msg}"));
    let spec = spec.trim();
    if spec == "diffuse" {
        return Ok(Hyperprior::default_diffuse());
    }
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| bad("expected diffuse, point:..., uniform:... or exp:..."))?;
    let nums: Vec<f64> = rest
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad("non-numeric parameter"))?;
    match (kind, nums.as_slice()) {
        ("point", [alpha, theta]) => Hyperprior::point_mass(*alpha, *theta),
        ("uniform", [alo, ahi, tlo, thi]) => {
            Hyperprior::product_uniform((*alo, *ahi), (*tlo, *thi))
        }
        ("exp", [alo, ahi, rate]) => {
            Hyperprior::product((*alo, *ahi), ThetaPrior::Exponential { rate: *rate })
        }
        _ => Err(bad("wrong number of parameters")),
    }
}

/// Inline "a=1,2,3;r=4,2,1" or a path to JSON {"a": [...], "r": [...]}.
pub fn parse_partition_spec(spec: &str) -> Result<IntegerPartition> {
    let spec = spec.trim();
    if let Some((a_part, r_part)) = spec.split_once(';') {
        let parse_list = |s: &str, key: &str| -> Result<Vec<usize>> {
            let body = s
                .trim()
                .strip_prefix(key)
                .and_then(|x| x.trim_start().strip_prefix('='))
                .ok_or_else(|| {
                    Error::Config(format!("partition spec '{spec}': expected '{key}=...'"))
                })?;
            body.split(',')
                .map(|x| {
                    x.trim().parse::<usize>().map_err(|_| {
                        Error::Config(format!("partition spec '{spec}': bad integer '{x}'"))
                    })
                })
                .collect()
        };
        let a = parse_list(a_part, "a")?;
        let r = parse_list(r_part, "r")?;
        return IntegerPartition::new(a, r);
    }
    let text = fs::read_to_string(spec).map_err(|e| {
        Error::Config(format!(
            "partition spec '{spec}' is neither inline (a=...;r=...) nor a readable file: {e}"
        ))
    })?;
    Ok(serde_json::from_str(&text)?)
}

/// Plain key = value file; `#` starts a comment. Unknown keys are rejected.
#[derive(Debug, Default)]
struct ConfigFile {
    prior: Option<String>,
    loci: Option<Vec<String>>,
    separator: Option<char>,
    mle_restarts: Option<usize>,
    mle_max_iters: Option<usize>,
    quad_mass_tol: Option<f64>,
    quad_value_tol: Option<f64>,
    mh_burn_in: Option<usize>,
    mh_thinning: Option<usize>,
}

impl ConfigFile {
    fn load(path: &Path) -> Result<ConfigFile> {
        let text = fs::read_to_string(path).map_err(|source| Error::FileRead {
            path: path.display().to_string(),
            source,
        })?;
        let map = parse_kv(&text, path)?;
        let mut cfg = ConfigFile::default();
        for (key, value) in map {
            match key.as_str() {
                "prior" => cfg.prior = Some(value),
                "loci" => cfg.loci = Some(value.split(',').map(|x| x.trim().to_string()).collect()),
                "separator" => {
                    let mut chars = value.chars();
                    let (Some(c), None) = (chars.next(), chars.next()) else {
                        return Err(Error::Config(format!(
                            "separator must be one character, got '{value}'"
                        )));
                    };
                    cfg.separator = Some(c);
                }
                "mle_restarts" => cfg.mle_restarts = Some(parse_num(&key, &value)?),
                "mle_max_iters" => cfg.mle_max_iters = Some(parse_num(&key, &value)?),
                "quad_mass_tol" => cfg.quad_mass_tol = Some(parse_num(&key, &value)?),
                "quad_value_tol" => cfg.quad_value_tol = Some(parse_num(&key, &value)?),
                "mh_burn_in" => cfg.mh_burn_in = Some(parse_num(&key, &value)?),
                "mh_thinning" => cfg.mh_thinning = Some(parse_num(&key, &value)?),
                other => {
                    return Err(Error::Config(format!(
                        "unknown configuration key '{other}'"
                    )))
                }
            }
        }
        Ok(cfg)
    }

    fn mle_options(&self) -> Result<MleOptions> {
        let mut opts = MleOptions::default();
        if let Some(r) = self.mle_restarts {
            if r == 0 {
                return Err(Error::Config("mle_restarts must be positive".into()));
            }
            opts.starts.truncate(r);
        }
        if let Some(iters) = self.mle_max_iters {
            opts.max_iters = iters;
        }
        Ok(opts)
    }

    fn quadrature_options(&self) -> Result<QuadratureOptions> {
        let mut opts = QuadratureOptions::default();
        if let Some(t) = self.quad_mass_tol {
            opts.mass_tol = t;
        }
        if let Some(t) = self.quad_value_tol {
            opts.value_tol = t;
        }
        Ok(opts)
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| Error::Config(format!("bad value for '{key}': '{value}'")))
}

fn parse_kv(text: &str, path: &Path) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line: lineno + 1,
                message: format!("expected 'key = value', got '{line}'"),
            });
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_experiment_spec(path: &Path) -> Result<ExperimentSpec> {
    let text = fs::read_to_string(path).map_err(|source| Error::FileRead {
        path: path.display().to_string(),
        source,
    })?;
    let mut map = parse_kv(&text, path)?;
    let mut take = |key: &str| map.remove(key);

    let name = match take("name").as_deref() {
        Some("model_fit") => ExperimentName::ModelFit,
        Some("surface") => ExperimentName::Surface,
        Some("test1") => ExperimentName::Test1,
        Some("test2") => ExperimentName::Test2,
        Some("test3") => ExperimentName::Test3,
        Some(other) => return Err(Error::Config(format!("unknown experiment name '{other}'"))),
        None => return Err(Error::Config("experiment spec needs 'name = ...'".into())),
    };

    let source = match take("source").as_deref() {
        Some("synthetic") | None => PopulationSource::Synthetic {
            alpha: parse_num("alpha", &take("alpha").unwrap_or_else(|| "0.5".into()))?,
            theta: parse_num("theta", &take("theta").unwrap_or_else(|| "216".into()))?,
        },
        Some("database") => {
            let path = take("db")
                .ok_or_else(|| Error::Config("database source needs 'db = path'".into()))?;
            let loci = take("loci")
                .map(|v| v.split(',').map(|x| x.trim().to_string()).collect())
                .unwrap_or_else(|| DEFAULT_LOCI.iter().map(|s| s.to_string()).collect());
            let filter = match (take("filter_column"), take("filter_value")) {
                (Some(c), Some(v)) => Some((c, v)),
                (None, None) => None,
                _ => {
                    return Err(Error::Config(
                        "filter_column and filter_value go together".into(),
                    ))
                }
            };
            PopulationSource::Database {
                path: PathBuf::from(path),
                loci,
                filter,
            }
        }
        Some(other) => return Err(Error::Config(format!("unknown source '{other}'"))),
    };

    let output_dir =
        PathBuf::from(take("out").unwrap_or_else(|| format!("runs/{}", name.as_str())));
    let mut spec = ExperimentSpec::new(name, source, output_dir);
    if let Some(v) = take("n_population") {
        spec.n_population = parse_num("n_population", &v)?;
    }
    if let Some(v) = take("n_sample") {
        spec.n_sample = parse_num("n_sample", &v)?;
    }
    if let Some(v) = take("n_replicates") {
        spec.n_replicates = parse_num("n_replicates", &v)?;
    }
    if let Some(v) = take("n_populations") {
        spec.n_populations = parse_num("n_populations", &v)?;
    }
    if let Some(v) = take("seed") {
        spec.seed = Seed(parse_num("seed", &v)?);
    }
    if let Some(v) = take("prior") {
        spec.prior = parse_prior_spec(&v)?;
    }
    if let Some(v) = take("mh_iterations") {
        spec.mh_iterations = parse_num("mh_iterations", &v)?;
    }
    if let Some(v) = take("grid_steps") {
        spec.grid_steps = parse_num("grid_steps", &v)?;
    }
    if let Some(stray) = map.keys().next() {
        return Err(Error::Config(format!(
            "unknown experiment spec key '{stray}'"
        )));
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prior_specs_parse() {
        assert_eq!(
            parse_prior_spec("diffuse").unwrap(),
            Hyperprior::default_diffuse()
        );
        assert_eq!(
            parse_prior_spec("point:0.5,216").unwrap(),
            Hyperprior::point_mass(0.5, 216.0).unwrap()
        );
        assert_eq!(
            parse_prior_spec("uniform:0.1,0.9,0,100").unwrap(),
            Hyperprior::product_uniform((0.1, 0.9), (0.0, 100.0)).unwrap()
        );
        assert_eq!(
            parse_prior_spec("exp:0,1,0.01").unwrap(),
            Hyperprior::product((0.0, 1.0), ThetaPrior::Exponential { rate: 0.01 }).unwrap()
        );
        assert!(parse_prior_spec("point:2,1").is_err());
        assert!(parse_prior_spec("gaussian:0,1").is_err());
        assert!(parse_prior_spec("point:a,b").is_err());
    }

    #[test]
    fn partition_specs_parse() {
        let part = parse_partition_spec("a=1,2,3;r=4,2,1").unwrap();
        assert_eq!(part.a(), &[1, 2, 3]);
        assert_eq!(part.r(), &[4, 2, 1]);
        assert_eq!(part.n(), 11);
        assert!(parse_partition_spec("a=2,1;r=1,1").is_err());
        assert!(parse_partition_spec("nonsense").is_err());

        let f = tempfile::NamedTempFile::new().unwrap();
        fs::write(f.path(), r#"{"a":[1,2],"r":[3,1]}"#).unwrap();
        let part = parse_partition_spec(&f.path().display().to_string()).unwrap();
        assert_eq!(part.n(), 5);
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let f = tempfile::NamedTempFile::new().unwrap();
        fs::write(f.path(), "prior = diffuse\nbogus = 1\n").unwrap();
        assert!(matches!(
            ConfigFile::load(f.path()),
            Err(Error::Config(msg)) if msg.contains("bogus")
        ));
    }

    #[test]
    fn config_parses_known_keys() {
        let f = tempfile::NamedTempFile::new().unwrap();
        fs::write(
            f.path(),
            "prior = point:0.5,216  # headline\nloci = L1, L2\nmle_restarts = 2\nquad_value_tol = 1e-8\n",
        )
        .unwrap();
        let cfg = ConfigFile::load(f.path()).unwrap();
        assert_eq!(cfg.prior.as_deref(), Some("point:0.5,216"));
        assert_eq!(cfg.loci, Some(vec!["L1".into(), "L2".into()]));
        assert_eq!(cfg.mle_options().unwrap().starts.len(), 2);
        assert_eq!(cfg.quadrature_options().unwrap().value_tol, 1e-8);
    }

    #[test]
    fn experiment_spec_roundtrip() {
        let f = tempfile::NamedTempFile::new().unwrap();
        fs::write(
            f.path(),
            "name = test2\nsource = synthetic\nalpha = 0.5\ntheta = 216\n\
             n_population = 2085\nn_sample = 100\nn_replicates = 100\nn_populations = 5\n\
             seed = 42\nout = /tmp/x\nmh_iterations = 1000\n",
        )
        .unwrap();
        let spec = parse_experiment_spec(f.path()).unwrap();
        assert_eq!(spec.name, ExperimentName::Test2);
        assert_eq!(spec.n_populations, 5);
        assert_eq!(spec.seed, Seed(42));

        let g = tempfile::NamedTempFile::new().unwrap();
        fs::write(g.path(), "name = test2\nwhatever = 1\n").unwrap();
        assert!(parse_experiment_spec(g.path()).is_err());
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(fnv1a(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a(b"a"), fnv1a(b"a"));
        assert_ne!(fnv1a(b"a"), fnv1a(b"b"));
    }
}
