//! Random-partition reductions of a reference database.
//!
//! A database of profiles is reduced to the partition of its row indexes
//! under the relation "same profile". Appending the suspect as a new
//! singleton and then joining the matching trace to it yields the three
//! nested partitions the likelihood ratio is computed from.

mod ingest;

pub use ingest::{ingest_database, IngestOptions, DEFAULT_LOCI};

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A partition of `{1..n}` into disjoint nonempty blocks.
///
/// Blocks are kept in canonical order (sorted by least element) and each
/// block's members are sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSetPartition", into = "RawSetPartition")]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawSetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl From<SetPartition> for RawSetPartition {
    fn from(p: SetPartition) -> Self {
        RawSetPartition {
            n: p.n,
            blocks: p.blocks,
        }
    }
}

impl TryFrom<RawSetPartition> for SetPartition {
    type Error = Error;
    fn try_from(raw: RawSetPartition) -> Result<Self> {
        SetPartition::from_blocks(raw.n, raw.blocks)
    }
}

impl SetPartition {
    /// Build from explicit blocks, validating that they partition `{1..n}`.
    pub fn from_blocks(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySample);
        }
        let mut seen = vec![false; n + 1];
        let mut count = 0usize;
        for block in &mut blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            block.sort_unstable();
            for &e in block.iter() {
                if e == 0 || e > n {
                    return Err(Error::InvalidPartition(format!(
                        "element {e} outside 1..={n}"
                    )));
                }
                if seen[e] {
                    return Err(Error::InvalidPartition(format!("element {e} repeated")));
                }
                seen[e] = true;
                count += 1;
            }
        }
        if count != n {
            return Err(Error::InvalidPartition(format!(
                "blocks cover {count} of {n} elements"
            )));
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(SetPartition { n, blocks })
    }

    /// Partition of `{1..n}` induced by label equality: `i` and `j` share a
    /// block iff `labels[i-1] == labels[j-1]`.
    pub fn from_labels<T: Eq + Hash>(labels: &[T]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptySample);
        }
        let mut index: HashMap<&T, usize> = HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, label) in labels.iter().enumerate() {
            let slot = *index.entry(label).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[slot].push(i + 1);
        }
        // First occurrences arrive in index order, so blocks are already
        // sorted by least element.
        Ok(SetPartition {
            n: labels.len(),
            blocks,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// Number of blocks of size one.
    pub fn singleton_count(&self) -> usize {
        self.blocks.iter().filter(|b| b.len() == 1).count()
    }

    /// Number of blocks of size `j` (zero when `j` is 0 or exceeds `n`).
    pub fn size_multiplicity(&self, j: usize) -> usize {
        self.blocks.iter().filter(|b| b.len() == j).count()
    }

    /// Append the suspect: a new singleton block `{n+1}`.
    pub fn extend_with_suspect(&self) -> SetPartition {
        let mut blocks = self.blocks.clone();
        blocks.push(vec![self.n + 1]);
        SetPartition {
            n: self.n + 1,
            blocks,
        }
    }

    /// Join the matching trace to the suspect's block: `{n+1}` becomes
    /// `{n+1, n+2}`. Requires the rare-type configuration, i.e. the last
    /// block is the singleton `{n+1}`.
    pub fn extend_with_trace(&self) -> Result<SetPartition> {
        if !self.is_rare_type() {
            return Err(Error::NotRareType);
        }
        let mut blocks = self.blocks.clone();
        blocks.last_mut().unwrap().push(self.n + 1);
        Ok(SetPartition {
            n: self.n + 1,
            blocks,
        })
    }

    /// True when the last block is the singleton `{n}` (the appended
    /// suspect in a rare-type case).
    pub fn is_rare_type(&self) -> bool {
        self.blocks.last().is_some_and(|b| b == &[self.n])
    }

    /// Reduce to the multiset of block sizes.
    pub fn to_integer_partition(&self) -> IntegerPartition {
        IntegerPartition::from_block_sizes(&self.block_sizes())
            .expect("a valid set partition always reduces")
    }
}

/// Block-size multiset of a partition of `n`, stored compactly as the
/// distinct sizes `a` (strictly increasing) with multiplicities `r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawIntegerPartition", into = "RawIntegerPartition")]
pub struct IntegerPartition {
    n: usize,
    a: Vec<usize>,
    r: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawIntegerPartition {
    a: Vec<usize>,
    r: Vec<usize>,
}

impl From<IntegerPartition> for RawIntegerPartition {
    fn from(p: IntegerPartition) -> Self {
        RawIntegerPartition { a: p.a, r: p.r }
    }
}

impl TryFrom<RawIntegerPartition> for IntegerPartition {
    type Error = Error;
    fn try_from(raw: RawIntegerPartition) -> Result<Self> {
        IntegerPartition::new(raw.a, raw.r)
    }
}

impl IntegerPartition {
    pub fn new(a: Vec<usize>, r: Vec<usize>) -> Result<Self> {
        if a.is_empty() || a.len() != r.len() {
            return Err(Error::InvalidPartition(
                "size and multiplicity lists must be nonempty and equal length".into(),
            ));
        }
        if !a.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(
                "distinct sizes must be strictly increasing".into(),
            ));
        }
        if a[0] == 0 || r.contains(&0) {
            return Err(Error::InvalidPartition(
                "sizes and multiplicities must be positive".into(),
            ));
        }
        let n = a.iter().zip(&r).map(|(ai, ri)| ai * ri).sum();
        Ok(IntegerPartition { n, a, r })
    }

    pub fn from_block_sizes(sizes: &[usize]) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::EmptySample);
        }
        let mut sorted = sizes.to_vec();
        sorted.sort_unstable();
        let mut a = Vec::new();
        let mut r = Vec::new();
        for s in sorted {
            if Some(&s) == a.last() {
                *r.last_mut().unwrap() += 1;
            } else {
                a.push(s);
                r.push(1);
            }
        }
        IntegerPartition::new(a, r)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Distinct block sizes, strictly increasing.
    pub fn a(&self) -> &[usize] {
        &self.a
    }

    /// Multiplicity of each distinct size.
    pub fn r(&self) -> &[usize] {
        &self.r
    }

    /// Total number of blocks.
    pub fn num_blocks(&self) -> usize {
        self.r.iter().sum()
    }

    /// Number of singleton blocks.
    pub fn singleton_count(&self) -> usize {
        self.singleton_class().map_or(0, |j| self.r[j])
    }

    /// Index into `a`/`r` of the size-1 class, if present.
    pub fn singleton_class(&self) -> Option<usize> {
        (self.a[0] == 1).then_some(0)
    }

    /// Expand back to a plain list of block sizes, ascending.
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.num_blocks());
        for (&ai, &ri) in self.a.iter().zip(&self.r) {
            out.extend(std::iter::repeat_n(ai, ri));
        }
        out
    }
}

/// One database row: an opaque identifier plus the canonical profile key
/// used for the equality reduction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub id: String,
    pub key: String,
}

/// All set partitions of `{1..n}` in restricted-growth-string order.
///
/// Exhaustive, so only usable for small `n` (Bell(12) is already ~4.2e6);
/// exact small-n checks are its purpose.
pub fn enumerate_set_partitions(n: usize) -> SetPartitionIter {
    assert!(n >= 1, "need n >= 1");
    SetPartitionIter {
        rgs: vec![0; n],
        maxima: vec![0; n],
        done: false,
    }
}

pub struct SetPartitionIter {
    rgs: Vec<usize>,
    maxima: Vec<usize>,
    done: bool,
}

impl Iterator for SetPartitionIter {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.done {
            return None;
        }
        let n = self.rgs.len();
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); self.rgs.iter().max().unwrap() + 1];
        for (i, &b) in self.rgs.iter().enumerate() {
            blocks[b].push(i + 1);
        }
        let current = SetPartition { n, blocks };

        // Advance the restricted growth string.
        let mut i = n;
        loop {
            if i == 1 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.rgs[i] <= self.maxima[i - 1] {
                self.rgs[i] += 1;
                let m = self.maxima[i - 1].max(self.rgs[i]);
                self.maxima[i] = m;
                for j in i + 1..n {
                    self.rgs[j] = 0;
                    self.maxima[j] = m;
                }
                break;
            }
        }
        Some(current)
    }
}
