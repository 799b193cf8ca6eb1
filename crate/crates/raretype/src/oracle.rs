//! The "true" likelihood ratio when the population frequencies are known.
//!
//! Given the frequency vector `p` (ranked, length `M`) and the block-size
//! multiset `(a, r)` of the suspect-extended sample, the ratio is
//! `N1 / E(sum of singleton frequencies | partition, p)` where `N1` is the
//! number of singletons. The expectation runs over the latent assignment
//! `chi` mapping frequency ranks to observed size classes: `chi_i = j`
//! means the `i`-th most frequent type is one of the `r_j` types observed
//! `a_j` times, and `chi_i = 0` means it was not observed. Conditional on
//! the partition, `P(chi)` is proportional to
//! `prod_{i: chi_i > 0} p_i^(a_{chi_i})` (the multinomial coefficient is
//! shared by every valid assignment), which a swap-move Metropolis chain
//! samples; tiny instances can be enumerated exactly instead.

use std::fs;
use std::path::Path;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::math::{mean, variance};
use crate::partition::IntegerPartition;
use crate::seed::Seed;

/// Ranked population frequencies: positive, non-increasing, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationFreqs {
    p: Vec<f64>,
}

impl PopulationFreqs {
    /// Build from weights (frequencies or counts): values are normalized
    /// and sorted in decreasing order.
    pub fn from_weights(mut weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidFrequencies("no entries".into()));
        }
        if weights.iter().any(|w| *w <= 0.0 || !w.is_finite()) {
            return Err(Error::InvalidFrequencies(
                "entries must be positive and finite".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        weights.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(PopulationFreqs { p: weights })
    }

    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        Self::from_weights(counts.iter().map(|&c| c as f64).collect())
    }

    pub fn uniform(m: usize) -> Result<Self> {
        Self::from_weights(vec![1.0; m.max(1)])
    }

    /// One value per line; blank lines and `#` comments are skipped.
    /// Values are treated as weights and normalized.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::FileRead {
            path: path.display().to_string(),
            source,
        })?;
        let mut weights = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let value: f64 = line.parse().map_err(|_| Error::Parse {
                path: path.display().to_string(),
                line: lineno + 1,
                message: format!("not a number: '{line}'"),
            })?;
            weights.push(value);
        }
        Self::from_weights(weights)
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }
}

/// Latent species-to-class assignment vector; entry `i` is the size class
/// (1-based index into `a`) of the `i`-th ranked type, or 0 if unseen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChiAssignment {
    chi: Vec<u32>,
}

impl ChiAssignment {
    /// Highest-weight valid assignment: classes are filled from the largest
    /// block size down, each taking the most frequent unassigned types.
    /// Also the initial chain state, shortening burn-in.
    pub fn initial(p: &PopulationFreqs, part: &IntegerPartition) -> Result<Self> {
        let k = part.num_blocks();
        if p.len() < k {
            return Err(Error::InvalidFrequencies(format!(
                "{} types cannot carry {} observed classes",
                p.len(),
                k
            )));
        }
        let mut chi = vec![0u32; p.len()];
        let mut next = 0usize;
        for j in (0..part.a().len()).rev() {
            for _ in 0..part.r()[j] {
                chi[next] = (j + 1) as u32;
                next += 1;
            }
        }
        Ok(ChiAssignment { chi })
    }

    pub fn from_vec(chi: Vec<u32>, part: &IntegerPartition) -> Result<Self> {
        let out = ChiAssignment { chi };
        out.validate(part)?;
        Ok(out)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.chi
    }

    /// Verify the class-count constraint: class `j` appears exactly `r_j`
    /// times.
    pub fn validate(&self, part: &IntegerPartition) -> Result<()> {
        let classes = part.a().len();
        let mut counts = vec![0usize; classes + 1];
        for &c in &self.chi {
            let c = c as usize;
            if c > classes {
                return Err(Error::CountConstraint {
                    class: c,
                    expected: 0,
                    found: 1,
                });
            }
            counts[c] += 1;
        }
        for (j, (&found, &expected)) in counts[1..].iter().zip(part.r()).enumerate() {
            if found != expected {
                return Err(Error::CountConstraint {
                    class: j + 1,
                    expected,
                    found,
                });
            }
        }
        Ok(())
    }
}

/// Unnormalized log target: `sum_{i: chi_i > 0} a_{chi_i} * ln p_i`.
pub fn chi_log_weight(
    chi: &ChiAssignment,
    p: &PopulationFreqs,
    part: &IntegerPartition,
) -> Result<f64> {
    chi.validate(part)?;
    let mut acc = 0.0;
    for (i, &c) in chi.as_slice().iter().enumerate() {
        if c > 0 {
            acc += part.a()[c as usize - 1] as f64 * p.as_slice()[i].ln();
        }
    }
    Ok(acc)
}

/// One swap move: two positions with differing classes are proposed
/// uniformly (equal-class pairs are resampled, so no-op moves are never
/// proposed) and the swap is accepted with the Metropolis ratio. The
/// class-count constraint is preserved by construction.
///
/// Returns the swapped positions on acceptance.
pub fn mh_step<R: Rng>(
    chi: &mut ChiAssignment,
    p: &PopulationFreqs,
    part: &IntegerPartition,
    rng: &mut R,
) -> Option<(usize, usize)> {
    let m = chi.chi.len();
    debug_assert!(m >= 2);
    let mut pick = || -> Option<(usize, usize)> {
        for _ in 0..64 {
            let i = rng.random_range(0..m);
            let j = rng.random_range(0..m);
            if chi.chi[i] != chi.chi[j] {
                return Some((i, j));
            }
        }
        // Near-degenerate vectors defeat rejection sampling; scan from a
        // random offset instead (constant vectors have no moves at all).
        let start = rng.random_range(0..m);
        for d in 1..m {
            let i = (start + d) % m;
            if chi.chi[i] != chi.chi[start] {
                return Some((start, i));
            }
        }
        None
    };
    let (i, j) = pick()?;

    let (ci, cj) = (chi.chi[i] as usize, chi.chi[j] as usize);
    let size = |c: usize| -> f64 {
        if c == 0 {
            0.0
        } else {
            part.a()[c - 1] as f64
        }
    };
    let freqs = p.as_slice();
    let delta = (size(cj) - size(ci)) * (freqs[i].ln() - freqs[j].ln());
    if delta >= 0.0 || rng.random::<f64>().ln() < delta {
        chi.chi.swap(i, j);
        Some((i, j))
    } else {
        None
    }
}

/// Chain length and bookkeeping for the Metropolis estimate.
#[derive(Debug, Clone, Serialize)]
pub struct MhConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub seed: Seed,
}

impl MhConfig {
    /// 10% burn-in, thinning 10.
    pub fn new(iterations: usize, seed: Seed) -> Self {
        MhConfig {
            iterations,
            burn_in: iterations / 10,
            thinning: 10,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.burn_in >= self.iterations || self.thinning == 0 {
            return Err(Error::Config(format!(
                "chain config invalid: iterations {}, burn-in {}, thinning {}",
                self.iterations, self.burn_in, self.thinning
            )));
        }
        Ok(())
    }
}

impl Default for MhConfig {
    fn default() -> Self {
        MhConfig::new(200_000, Seed(0))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MhEstimate {
    pub value: f64,
    /// Batch-means Monte-Carlo standard error.
    pub mc_std_error: f64,
    pub samples: usize,
    pub acceptance_rate: f64,
}

const BATCHES: usize = 50;

/// Chain estimate of `E(sum of singleton frequencies | partition, p)`.
pub fn estimate_singleton_mass(
    p: &PopulationFreqs,
    part: &IntegerPartition,
    cfg: &MhConfig,
) -> Result<MhEstimate> {
    Ok(run_singleton_chain(p, part, cfg)?.0)
}

/// As [`estimate_singleton_mass`], also returning the thinned draws of the
/// singleton-mass statistic for trace inspection.
pub fn estimate_singleton_mass_with_trace(
    p: &PopulationFreqs,
    part: &IntegerPartition,
    cfg: &MhConfig,
) -> Result<(MhEstimate, Vec<f64>)> {
    run_singleton_chain(p, part, cfg)
}

fn run_singleton_chain(
    p: &PopulationFreqs,
    part: &IntegerPartition,
    cfg: &MhConfig,
) -> Result<(MhEstimate, Vec<f64>)> {
    cfg.validate()?;
    let singleton_class = part.singleton_class().ok_or(Error::NoSingletonClass)? as u32 + 1;
    let mut chi = ChiAssignment::initial(p, part)?;
    let freqs = p.as_slice();

    // Single-state space: every type observed in the same class.
    if part.a().len() == 1 && part.r()[0] == p.len() {
        return Ok((
            MhEstimate {
                value: 1.0,
                mc_std_error: 0.0,
                samples: 1,
                acceptance_rate: 1.0,
            },
            vec![1.0],
        ));
    }

    let exact_mass = |chi: &ChiAssignment| -> f64 {
        chi.as_slice()
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c == singleton_class)
            .map(|(i, _)| freqs[i])
            .sum()
    };

    let mut rng = cfg.seed.rng();
    let mut accepted = 0usize;
    let mut draws: Vec<f64> = Vec::with_capacity((cfg.iterations - cfg.burn_in) / cfg.thinning + 1);
    let mut mass = exact_mass(&chi);
    for step in 0..cfg.iterations {
        if let Some((i, j)) = mh_step(&mut chi, p, part, &mut rng) {
            accepted += 1;
            // After the swap, position i holds what j had and vice versa.
            let gained = u32::from(chi.chi[i] == singleton_class) as f64
                - u32::from(chi.chi[j] == singleton_class) as f64;
            mass += gained * (freqs[i] - freqs[j]);
        }
        if step >= cfg.burn_in && (step - cfg.burn_in).is_multiple_of(cfg.thinning) {
            // Kill incremental drift at a coarse cadence.
            if draws.len().is_multiple_of(1024) {
                mass = exact_mass(&chi);
            }
            draws.push(mass);
        }
    }

    let value = mean(&draws);
    let mc_std_error = if draws.len() >= 2 * BATCHES {
        let batch = draws.len() / BATCHES;
        let means: Vec<f64> = draws[..batch * BATCHES].chunks(batch).map(mean).collect();
        (variance(&means) / BATCHES as f64).sqrt()
    } else if draws.len() >= 2 {
        (variance(&draws) / draws.len() as f64).sqrt()
    } else {
        0.0
    };
    let estimate = MhEstimate {
        value,
        mc_std_error,
        samples: draws.len(),
        acceptance_rate: accepted as f64 / cfg.iterations as f64,
    };
    Ok((estimate, draws))
}

/// Exact expectation of the singleton mass by enumerating every valid
/// assignment. Only for tiny instances: errors out when the state count
/// exceeds `1e7`.
pub fn enumerate_chi_expectation(p: &PopulationFreqs, part: &IntegerPartition) -> Result<f64> {
    let singleton_class = part.singleton_class().ok_or(Error::NoSingletonClass)? as u32 + 1;
    if p.len() < part.num_blocks() {
        return Err(Error::InvalidFrequencies(format!(
            "{} types cannot carry {} observed classes",
            p.len(),
            part.num_blocks()
        )));
    }
    let states = assignment_count(p.len(), part.r());
    if states > 1e7 {
        return Err(Error::InstanceTooLarge { states, bound: 1e7 });
    }
    let start = ChiAssignment::initial(p, part)?;
    // The initial assignment pairs the largest classes with the most
    // frequent types, which maximizes the log weight (rearrangement), so
    // shifting by it keeps every exponent at or below zero.
    let shift = chi_log_weight(&start, p, part)?;

    let mut remaining: Vec<usize> = std::iter::once(p.len() - part.num_blocks())
        .chain(part.r().iter().copied())
        .collect();
    let mut num = 0.0;
    let mut den = 0.0;
    let mut state = EnumState {
        freqs: p.as_slice(),
        sizes: part.a(),
        singleton_class,
        shift,
        num: &mut num,
        den: &mut den,
    };
    enumerate_rec(&mut state, &mut remaining, 0, 0.0, 0.0);
    Ok(num / den)
}

struct EnumState<'a> {
    freqs: &'a [f64],
    sizes: &'a [usize],
    singleton_class: u32,
    shift: f64,
    num: &'a mut f64,
    den: &'a mut f64,
}

fn enumerate_rec(
    state: &mut EnumState,
    remaining: &mut Vec<usize>,
    pos: usize,
    log_w: f64,
    singleton_mass: f64,
) {
    if pos == state.freqs.len() {
        let w = (log_w - state.shift).exp();
        *state.num += w * singleton_mass;
        *state.den += w;
        return;
    }
    for c in 0..remaining.len() {
        if remaining[c] == 0 {
            continue;
        }
        remaining[c] -= 1;
        let (dl, dm) = if c == 0 {
            (0.0, 0.0)
        } else {
            let dl = state.sizes[c - 1] as f64 * state.freqs[pos].ln();
            let dm = if c as u32 == state.singleton_class {
                state.freqs[pos]
            } else {
                0.0
            };
            (dl, dm)
        };
        enumerate_rec(state, remaining, pos + 1, log_w + dl, singleton_mass + dm);
        remaining[c] += 1;
    }
}

/// Number of valid assignments `M! / (prod r_j! * (M - K)!)`, in floating
/// point for the size guard.
fn assignment_count(m: usize, multiplicities: &[usize]) -> f64 {
    let k: usize = multiplicities.iter().sum();
    if k > m {
        return f64::INFINITY;
    }
    let ln_fact = |x: usize| statrs::function::gamma::ln_gamma(x as f64 + 1.0);
    let mut log = ln_fact(m) - ln_fact(m - k);
    for &r in multiplicities {
        log -= ln_fact(r);
    }
    log.exp()
}

#[derive(Debug, Clone, Serialize)]
pub struct TrueLr {
    pub lr: f64,
    pub mc_std_error: f64,
    pub singleton_count: usize,
    pub estimate: MhEstimate,
}

/// `N1 / E(singleton mass)` for the suspect-extended partition, with the
/// Monte-Carlo error propagated through the ratio (delta method).
pub fn true_lr(
    p: &PopulationFreqs,
    part_plus: &IntegerPartition,
    cfg: &MhConfig,
) -> Result<TrueLr> {
    let n1 = part_plus.singleton_count();
    if n1 == 0 {
        return Err(Error::NoSingletonClass);
    }
    let estimate = estimate_singleton_mass(p, part_plus, cfg)?;
    let lr = n1 as f64 / estimate.value;
    let mc_std_error = n1 as f64 * estimate.mc_std_error / (estimate.value * estimate.value);
    Ok(TrueLr {
        lr,
        mc_std_error,
        singleton_count: n1,
        estimate,
    })
}

/// Exact counterpart of [`true_lr`] for tiny instances.
pub fn true_lr_exhaustive(p: &PopulationFreqs, part_plus: &IntegerPartition) -> Result<f64> {
    let n1 = part_plus.singleton_count();
    if n1 == 0 {
        return Err(Error::NoSingletonClass);
    }
    Ok(n1 as f64 / enumerate_chi_expectation(p, part_plus)?)
}
