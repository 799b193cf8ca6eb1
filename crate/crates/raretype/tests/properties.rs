//! Property tests for the invariants that hold across module boundaries.

use proptest::collection::vec;
use proptest::prelude::*;

use raretype::inference::{lr_bayes, Hyperprior};
use raretype::partition::{IntegerPartition, SetPartition};
use raretype::pyp::{log_eppf, log_eppf_of, HyperParams};

/// Injective map on the label alphabet (odd multiplier on u32).
fn relabel(v: u8) -> u32 {
    (v as u32).wrapping_mul(0x9E37_79B1) ^ 0xDEAD_BEEF
}

proptest! {
    /// Labels carry no information beyond equality: any injective
    /// relabeling induces the same partition.
    #[test]
    fn partition_invariant_under_injective_relabeling(labels in vec(any::<u8>(), 1..200)) {
        let direct = SetPartition::from_labels(&labels).unwrap();
        let renamed: Vec<u32> = labels.iter().map(|&v| relabel(v)).collect();
        let indirect = SetPartition::from_labels(&renamed).unwrap();
        prop_assert_eq!(direct, indirect);
    }

    /// The partition probability is exchangeable: it only sees the
    /// block-size multiset, so shuffling the observations changes nothing.
    #[test]
    fn log_eppf_is_exchangeable(
        labels in vec(0u8..20, 2..60),
        shift in 0usize..59,
        alpha in 0.01f64..0.95,
    ) {
        let mut shuffled = labels.clone();
        shuffled.rotate_left(shift % labels.len());
        let h = HyperParams::new(alpha, 2.5).unwrap();
        let a = SetPartition::from_labels(&labels).unwrap();
        let b = SetPartition::from_labels(&shuffled).unwrap();
        prop_assert_eq!(
            a.to_integer_partition(),
            b.to_integer_partition()
        );
        prop_assert!((log_eppf_of(&a, &h) - log_eppf_of(&b, &h)).abs() < 1e-12);
    }

    /// Blocks reassemble to exactly {1..n}, whatever the labels were.
    #[test]
    fn blocks_partition_the_ground_set(labels in vec(any::<u16>(), 1..300)) {
        let p = SetPartition::from_labels(&labels).unwrap();
        let mut seen = vec![false; p.n() + 1];
        for block in p.blocks() {
            prop_assert!(!block.is_empty());
            for &e in block {
                prop_assert!(e >= 1 && e <= p.n());
                prop_assert!(!seen[e], "element {} twice", e);
                seen[e] = true;
            }
        }
        prop_assert!(seen[1..].iter().all(|&s| s));
        // Canonical order: blocks sorted by least element.
        let mins: Vec<usize> = p.blocks().iter().map(|b| b[0]).collect();
        prop_assert!(mins.windows(2).all(|w| w[0] < w[1]));
    }

    /// Appending the suspect adds exactly one to the singleton class and
    /// the two singleton counters agree.
    #[test]
    fn suspect_extension_bumps_singletons(labels in vec(0u8..30, 1..100)) {
        let p = SetPartition::from_labels(&labels).unwrap();
        prop_assert_eq!(p.singleton_count(), p.size_multiplicity(1));
        let plus = p.extend_with_suspect();
        prop_assert_eq!(plus.singleton_count(), p.singleton_count() + 1);
        prop_assert_eq!(
            plus.to_integer_partition().singleton_count(),
            p.to_integer_partition().singleton_count() + 1
        );
    }

    /// The closed-form collapse of the ratio under a point hyperprior,
    /// end to end from raw labels.
    #[test]
    fn point_prior_ratio_collapses(
        labels in vec(0u16..500, 2..120),
        alpha in 0.05f64..0.9,
        theta in 0.0f64..300.0,
    ) {
        let p_plus = SetPartition::from_labels(&labels).unwrap().extend_with_suspect();
        let n = p_plus.n() - 1;
        let prior = Hyperprior::point_mass(alpha, theta).unwrap();
        let report = lr_bayes(&p_plus, &prior).unwrap();
        let closed = (n as f64 + 1.0 + theta) / (1.0 - alpha);
        prop_assert!((report.lr_bayes - closed).abs() < 1e-9 * closed);
    }

    /// Integer partitions round-trip through their JSON form.
    #[test]
    fn integer_partition_json_roundtrip(sizes in vec(1usize..12, 1..40)) {
        let part = IntegerPartition::from_block_sizes(&sizes).unwrap();
        let js = serde_json::to_string(&part).unwrap();
        let back: IntegerPartition = serde_json::from_str(&js).unwrap();
        prop_assert_eq!(&back, &part);
        prop_assert_eq!(back.n(), sizes.iter().sum::<usize>());
    }

    /// Sequential consistency pins the probability recursion: extending a
    /// random partition by one element multiplies its probability by the
    /// seating rule.
    #[test]
    fn eppf_sequential_consistency(
        labels in vec(0u8..8, 1..30),
        alpha in 0.01f64..0.95,
        theta_shift in 0.02f64..50.0,
    ) {
        let theta = -alpha + theta_shift;
        let h = HyperParams::new(alpha, theta).unwrap();
        let p = SetPartition::from_labels(&labels).unwrap();
        let n = p.n() as f64;
        let base = log_eppf_of(&p, &h);

        // New block.
        let ext = p.extend_with_suspect();
        let expect = base + ((theta + p.num_blocks() as f64 * alpha) / (n + theta)).ln();
        prop_assert!((log_eppf_of(&ext, &h) - expect).abs() < 1e-10);

        // Join the first block.
        let mut blocks = p.blocks().to_vec();
        blocks[0].push(p.n() + 1);
        let joined = SetPartition::from_blocks(p.n() + 1, blocks).unwrap();
        let expect = base + ((p.blocks()[0].len() as f64 - alpha) / (n + theta)).ln();
        prop_assert!((log_eppf_of(&joined, &h) - expect).abs() < 1e-10);
    }
}

/// Exchangeability stated directly on the sufficient statistic: any two
/// set partitions with the same block sizes get the same probability.
#[test]
fn eppf_depends_only_on_the_size_multiset() {
    let h = HyperParams::new(0.4, 3.0).unwrap();
    let a = SetPartition::from_labels(&[1, 1, 2, 3, 3, 3]).unwrap();
    let b = SetPartition::from_labels(&[7, 5, 5, 5, 9, 9]).unwrap();
    assert_eq!(a.to_integer_partition(), b.to_integer_partition());
    assert_eq!(
        log_eppf(&a.to_integer_partition(), &h),
        log_eppf(&b.to_integer_partition(), &h)
    );
}
