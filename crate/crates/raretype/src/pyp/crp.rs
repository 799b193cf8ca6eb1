//! Sequential seating sampler for the two-parameter model.
//!
//! Customer `n+1` joins an occupied table `i` with probability
//! `(n_i - alpha)/(n + theta)` and opens a new table with probability
//! `(theta + k*alpha)/(n + theta)`. The induced partition of customers by
//! table follows the same law as the partition probability in `eppf`.

use rand::Rng;

use crate::error::Result;
use crate::partition::SetPartition;
use crate::seed::Seed;

use super::HyperParams;

/// Incremental seating-plan sampler.
///
/// Table occupancies (minus the discount) are kept in a Fenwick tree, so a
/// full run of `n` customers over `k` tables costs `O(n log k)`.
pub struct CrpSampler {
    alpha: f64,
    theta: f64,
    counts: Vec<u64>,
    tree: Fenwick,
    customers: u64,
    singletons: u64,
}

impl CrpSampler {
    pub fn new(h: &HyperParams) -> Result<Self> {
        h.require_positive_discount()?;
        Ok(CrpSampler {
            alpha: h.alpha(),
            theta: h.theta(),
            counts: Vec::new(),
            tree: Fenwick::new(),
            customers: 0,
            singletons: 0,
        })
    }

    /// Seat the next customer; returns the 0-based table index.
    pub fn step<R: Rng>(&mut self, rng: &mut R) -> usize {
        let k = self.counts.len();
        let total = self.customers as f64 + self.theta;
        let new_weight = self.theta + k as f64 * self.alpha;
        let table = if k == 0 {
            self.open_table()
        } else {
            let u: f64 = rng.random::<f64>() * total;
            if u < new_weight {
                self.open_table()
            } else {
                let i = self.tree.search(u - new_weight).min(k - 1);
                self.counts[i] += 1;
                if self.counts[i] == 2 {
                    self.singletons -= 1;
                }
                self.tree.add(i, 1.0);
                i
            }
        };
        self.customers += 1;
        table
    }

    fn open_table(&mut self) -> usize {
        self.counts.push(1);
        self.singletons += 1;
        self.tree.push(1.0 - self.alpha);
        self.counts.len() - 1
    }

    pub fn customers(&self) -> u64 {
        self.customers
    }

    pub fn num_tables(&self) -> usize {
        self.counts.len()
    }

    /// Occupancy per table in creation order.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of tables currently holding exactly one customer.
    pub fn singleton_tables(&self) -> u64 {
        self.singletons
    }
}

/// Sample the partition of `{1..n}` induced by seating `n` customers.
pub fn crp_sample(n: usize, h: &HyperParams, seed: Seed) -> Result<SetPartition> {
    let mut sampler = CrpSampler::new(h)?;
    let mut rng = seed.rng();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for customer in 1..=n {
        let table = sampler.step(&mut rng);
        if table == blocks.len() {
            blocks.push(Vec::new());
        }
        blocks[table].push(customer);
    }
    // Tables are created in order of their first customer, so the blocks
    // are already canonically ordered.
    SetPartition::from_blocks(n, blocks)
}

/// Sample only the table occupancies (creation order) of an `n`-customer run.
pub fn crp_counts(n: usize, h: &HyperParams, seed: Seed) -> Result<Vec<u64>> {
    let mut sampler = CrpSampler::new(h)?;
    let mut rng = seed.rng();
    for _ in 0..n {
        sampler.step(&mut rng);
    }
    Ok(sampler.counts)
}

/// Sample the full seating plan: element `i` of the result is the 0-based
/// table index of customer `i+1`.
pub fn crp_assignments(n: usize, h: &HyperParams, seed: Seed) -> Result<Vec<u32>> {
    let mut sampler = CrpSampler::new(h)?;
    let mut rng = seed.rng();
    let mut plan = Vec::with_capacity(n);
    for _ in 0..n {
        plan.push(sampler.step(&mut rng) as u32);
    }
    Ok(plan)
}

/// Fenwick (binary indexed) tree over f64 weights with prefix search.
struct Fenwick {
    tree: Vec<f64>,
    len: usize,
}

impl Fenwick {
    fn new() -> Self {
        Fenwick {
            tree: vec![0.0; 1],
            len: 0,
        }
    }

    fn push(&mut self, w: f64) {
        if self.len + 1 >= self.tree.len() {
            self.grow();
        }
        self.len += 1;
        self.add(self.len - 1, w);
    }

    fn grow(&mut self) {
        let new_cap = (self.tree.len() * 2).max(2);
        // Rebuild from scratch: amortized O(n) over a whole run.
        let mut values = vec![0.0; self.len];
        for (i, v) in values.iter_mut().enumerate() {
            *v = self.range_value(i);
        }
        self.tree = vec![0.0; new_cap];
        for (i, v) in values.into_iter().enumerate() {
            self.add_raw(i, v);
        }
    }

    fn range_value(&self, i: usize) -> f64 {
        self.prefix(i + 1) - self.prefix(i)
    }

    fn prefix(&self, mut count: usize) -> f64 {
        let mut s = 0.0;
        while count > 0 {
            s += self.tree[count];
            count &= count - 1;
        }
        s
    }

    fn add(&mut self, i: usize, delta: f64) {
        debug_assert!(i < self.len);
        self.add_raw(i, delta);
    }

    fn add_raw(&mut self, i: usize, delta: f64) {
        let mut idx = i + 1;
        while idx < self.tree.len() {
            self.tree[idx] += delta;
            idx += idx & idx.wrapping_neg();
        }
    }

    /// Smallest 0-based index whose prefix sum exceeds `target`; may return
    /// `len` when `target` is at or beyond the total, so callers clamp.
    fn search(&self, mut target: f64) -> usize {
        let mut pos = 0usize;
        let mut step = (self.tree.len() / 2).next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && next <= self.len && self.tree[next] <= target {
                target -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        pos
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pyp::log_eppf_of;

    #[test]
    fn first_customer_always_opens_a_table() {
        let h = HyperParams::new(0.5, 1.0).unwrap();
        for s in 0..20 {
            let p = crp_sample(1, &h, Seed(s)).unwrap();
            assert_eq!(p.blocks(), &[vec![1]]);
        }
    }

    #[test]
    fn occupancies_sum_to_customers() {
        let h = HyperParams::new(0.5, 20.0).unwrap();
        let counts = crp_counts(10_000, &h, Seed(3)).unwrap();
        assert_eq!(counts.iter().sum::<u64>(), 10_000);
    }

    #[test]
    fn seed_determinism_bit_for_bit() {
        let h = HyperParams::new(0.25, 5.0).unwrap();
        let a = crp_sample(500, &h, Seed(11)).unwrap();
        let b = crp_sample(500, &h, Seed(11)).unwrap();
        assert_eq!(a, b);
        let c = crp_sample(500, &h, Seed(12)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_discount_rejected() {
        let h = HyperParams::new(0.0, 1.0).unwrap();
        assert!(crp_sample(5, &h, Seed(0)).is_err());
    }

    /// Spot-check the seating probabilities against hand arithmetic:
    /// with tables (2, 1) at alpha = 0.5, theta = 1, the next customer
    /// picks (0.375, 0.125, 0.5 new).
    #[test]
    fn transition_probabilities_match_arithmetic() {
        let h = HyperParams::new(0.5, 1.0).unwrap();
        let mut hits = [0u64; 3];
        let reps = 200_000u64;
        for s in 0..reps {
            let mut sampler = CrpSampler::new(&h).unwrap();
            // Force the state: seat customers at tables 0, 0, 1 by rejection.
            let mut rng = Seed(s).rng();
            let t1 = sampler.step(&mut rng);
            assert_eq!(t1, 0);
            // Drive to state (2, 1) deterministically instead of by chance:
            // feed steps until the pattern matches, else skip the seed.
            let t2 = sampler.step(&mut rng);
            let t3 = sampler.step(&mut rng);
            if !(t2 == 0 && t3 == 1) {
                continue;
            }
            let t4 = sampler.step(&mut rng);
            hits[t4.min(2)] += 1;
        }
        let total: u64 = hits.iter().sum();
        assert!(total > 10_000);
        let freqs: Vec<f64> = hits.iter().map(|&h| h as f64 / total as f64).collect();
        for (freq, expect) in freqs.iter().zip([0.375, 0.125, 0.5]) {
            let se = (expect * (1.0 - expect) / total as f64).sqrt();
            assert!(
                (freq - expect).abs() < 5.0 * se,
                "freqs {freqs:?} vs (0.375, 0.125, 0.5)"
            );
        }
    }

    /// Small-scale version of the sampler/probability agreement test; the
    /// acceptance suite runs the full 1e6-sample version.
    #[test]
    fn induced_partition_matches_eppf_at_n3() {
        let h = HyperParams::new(0.5, 1.0).unwrap();
        let master = Seed(42);
        let reps = 100_000usize;
        let mut tally = std::collections::HashMap::<Vec<Vec<usize>>, u64>::new();
        for i in 0..reps {
            let p = crp_sample(3, &h, master.child(i as u64)).unwrap();
            *tally.entry(p.blocks().to_vec()).or_insert(0) += 1;
        }
        for p in crate::partition::enumerate_set_partitions(3) {
            let prob = log_eppf_of(&p, &h).exp();
            let observed = *tally.get(p.blocks()).unwrap_or(&0) as f64 / reps as f64;
            let se = (prob * (1.0 - prob) / reps as f64).sqrt();
            assert!(
                (observed - prob).abs() < 4.0 * se,
                "partition {:?}: observed {observed}, expected {prob}",
                p.blocks()
            );
        }
    }
}
