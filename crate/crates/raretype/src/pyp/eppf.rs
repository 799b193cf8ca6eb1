//! Exchangeable partition probability function of the two-parameter model.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::partition::{IntegerPartition, SetPartition};

use super::HyperParams;

/// log of the generalized rising factorial
/// `[x]_{a;b} = prod_{i=0}^{a-1} (x + i*b)`, with `[x]_{0;b} = 1`.
///
/// Every factor must be strictly positive.
pub fn log_rising_factorial(x: f64, a: usize, b: f64) -> Result<f64> {
    if a == 0 {
        return Ok(0.0);
    }
    if b == 0.0 {
        if x <= 0.0 {
            return Err(Error::NonpositiveFactor {
                x,
                b,
                index: 0,
                factor: x,
            });
        }
        return Ok(a as f64 * x.ln());
    }
    if b > 0.0 {
        if x <= 0.0 {
            return Err(Error::NonpositiveFactor {
                x,
                b,
                index: 0,
                factor: x,
            });
        }
        if a <= 32 {
            let mut acc = 0.0;
            for i in 0..a {
                acc += (x + i as f64 * b).ln();
            }
            return Ok(acc);
        }
        // [x]_{a;b} = b^a * Gamma(x/b + a) / Gamma(x/b) for b > 0.
        let q = x / b;
        let a_f = a as f64;
        if q > 1e12 * a_f {
            // ln Gamma(q + a) - ln Gamma(q) -> a ln q + a(a-1)/(2q); the
            // direct difference overflows long before q reaches 1e300.
            return Ok(a_f * b.ln() + a_f * q.ln() + a_f * (a_f - 1.0) / (2.0 * q));
        }
        return Ok(a_f * b.ln() + ln_gamma(q + a_f) - ln_gamma(q));
    }
    // b < 0: factors decrease, check each one.
    let mut acc = 0.0;
    for i in 0..a {
        let factor = x + i as f64 * b;
        if factor <= 0.0 {
            return Err(Error::NonpositiveFactor {
                x,
                b,
                index: i,
                factor,
            });
        }
        acc += factor.ln();
    }
    Ok(acc)
}

/// Log probability of a partition under the two-parameter sampling formula:
///
/// `P(pi) = [theta+alpha]_{k-1;alpha} / [theta+1]_{n-1;1} * prod_i [1-alpha]_{n_i-1;1}`
///
/// where `k` is the number of blocks and `n_i` the block sizes. The value
/// depends on the partition only through its block-size multiset, and at
/// `alpha == 0` it reduces to the one-parameter (Ewens) sampling formula.
pub fn log_eppf(part: &IntegerPartition, h: &HyperParams) -> f64 {
    let n = part.n();
    let k = part.num_blocks();
    let alpha = h.alpha();
    let theta = h.theta();

    // All factors are positive on the validity region, so these cannot fail.
    let mut acc = log_rising_factorial(theta + alpha, k - 1, alpha).expect("theta + alpha > 0")
        - log_rising_factorial(theta + 1.0, n - 1, 1.0).expect("theta + 1 > 0");
    for (&size, &mult) in part.a().iter().zip(part.r()) {
        acc +=
            mult as f64 * log_rising_factorial(1.0 - alpha, size - 1, 1.0).expect("1 - alpha > 0");
    }
    acc
}

/// Convenience wrapper reducing a set partition first.
pub fn log_eppf_of(p: &SetPartition, h: &HyperParams) -> f64 {
    log_eppf(&p.to_integer_partition(), h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::log_sum_exp;
    use crate::partition::enumerate_set_partitions;

    #[test]
    fn rising_factorial_basics() {
        let v = log_rising_factorial(2.0, 3, 1.0).unwrap();
        assert!((v - 24f64.ln()).abs() < 1e-14); // 2*3*4
        assert_eq!(log_rising_factorial(5.0, 0, 7.0).unwrap(), 0.0);
        assert_eq!(log_rising_factorial(1.0, 1, 0.5).unwrap(), 0.0);
        assert!((log_rising_factorial(3.0, 4, 0.0).unwrap() - 4.0 * 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn rising_factorial_domain_errors() {
        assert!(log_rising_factorial(-1.0, 2, 1.0).is_err());
        assert!(log_rising_factorial(0.0, 1, 1.0).is_err());
        // x + i*b crosses zero at i = 2.
        assert!(matches!(
            log_rising_factorial(1.0, 4, -0.5),
            Err(Error::NonpositiveFactor { index: 2, .. })
        ));
    }

    #[test]
    fn rising_factorial_loop_and_gamma_paths_agree() {
        for &(x, b) in &[(1.7, 1.0), (0.3, 0.5), (216.0, 1.0), (2.0, 0.25)] {
            for &a in &[33usize, 64, 101, 1000] {
                let gamma_path = log_rising_factorial(x, a, b).unwrap();
                let loop_path: f64 = (0..a).map(|i| (x + i as f64 * b).ln()).sum();
                assert!(
                    (gamma_path - loop_path).abs() < 1e-9 * loop_path.abs().max(1.0),
                    "x={x} a={a} b={b}: {gamma_path} vs {loop_path}"
                );
            }
        }
    }

    /// Arguments far beyond the gamma function's overflow point still give
    /// finite, accurate values through the asymptotic branch.
    #[test]
    fn rising_factorial_survives_enormous_arguments() {
        for &x in &[1e250, 1e300] {
            for &a in &[40usize, 500] {
                let got = log_rising_factorial(x, a, 1.0).unwrap();
                let expect = a as f64 * x.ln(); // factors are all ~x
                assert!(got.is_finite());
                assert!(
                    (got - expect).abs() < 1e-9 * expect,
                    "x={x} a={a}: {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn pair_partition_probabilities() {
        let h = HyperParams::new(0.3, 1.0).unwrap();
        let together = IntegerPartition::from_block_sizes(&[2]).unwrap();
        let apart = IntegerPartition::from_block_sizes(&[1, 1]).unwrap();
        assert!((log_eppf(&together, &h) - 0.35f64.ln()).abs() < 1e-12);
        assert!((log_eppf(&apart, &h) - 0.65f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn single_observation_has_probability_one() {
        let part = IntegerPartition::from_block_sizes(&[1]).unwrap();
        for &(a, t) in &[(0.0, 1.0), (0.5, 216.0), (0.9, -0.5)] {
            let h = HyperParams::new(a, t).unwrap();
            assert_eq!(log_eppf(&part, &h), 0.0);
        }
    }

    #[test]
    fn depends_only_on_block_sizes() {
        let h = HyperParams::new(0.5, 2.0).unwrap();
        let p1 = SetPartition::from_labels(&[1, 1, 2, 3]).unwrap();
        let p2 = SetPartition::from_labels(&[5, 6, 7, 5]).unwrap();
        assert_eq!(p1.to_integer_partition(), p2.to_integer_partition());
        assert_eq!(log_eppf_of(&p1, &h), log_eppf_of(&p2, &h));
    }

    /// The probabilities of all partitions of `{1..n}` sum to one. This is
    /// the normalization that pins down the empty-product convention of the
    /// rising factorial.
    #[test]
    fn normalizes_on_small_ground_sets() {
        for n in 1..=6 {
            for &(a, t) in &[(0.0, 0.5), (0.25, 1.0), (0.5, -0.45), (0.9, 216.0)] {
                let h = HyperParams::new(a, t).unwrap();
                let logs: Vec<f64> = enumerate_set_partitions(n)
                    .map(|p| log_eppf_of(&p, &h))
                    .collect();
                let total = log_sum_exp(&logs).exp();
                assert!(
                    (total - 1.0).abs() < 1e-10,
                    "n={n} alpha={a} theta={t}: total {total}"
                );
            }
        }
    }

    /// Extending a partition by one element multiplies its probability by
    /// the corresponding sequential seating probability.
    #[test]
    fn sequential_consistency_with_seating_rule() {
        let h = HyperParams::new(0.4, 0.7).unwrap();
        for n in 1..=6usize {
            for p in enumerate_set_partitions(n) {
                let base = log_eppf_of(&p, &h).exp();
                let k = p.num_blocks() as f64;
                // Element n+1 joins block i.
                for i in 0..p.num_blocks() {
                    let mut blocks = p.blocks().to_vec();
                    blocks[i].push(n + 1);
                    let ext = SetPartition::from_blocks(n + 1, blocks).unwrap();
                    let transition =
                        (p.blocks()[i].len() as f64 - h.alpha()) / (n as f64 + h.theta());
                    let expect = base * transition;
                    let got = log_eppf_of(&ext, &h).exp();
                    assert!((got - expect).abs() < 1e-12, "join case n={n}");
                }
                // Element n+1 opens a new block.
                let ext = p.extend_with_suspect();
                let transition = (h.theta() + k * h.alpha()) / (n as f64 + h.theta());
                let expect = base * transition;
                let got = log_eppf_of(&ext, &h).exp();
                assert!((got - expect).abs() < 1e-12, "new-block case n={n}");
            }
        }
    }
}
