//! Discovery of approximate conditional-independence structure: split the
//! residual variables under a conditioning set into blocks whose minimum
//! information cut exceeds a threshold, and collect one such partition per
//! small candidate separator.

use std::collections::{BTreeMap, BTreeSet};

use crate::discrete::{JointTable, SubsetV};
use crate::error::{Error, Result};
use crate::estimation::EntropyOracle;
use crate::submodular::{info_cut_oracle, queyranne_minimize};

/// A partition of a ground set into nonempty disjoint blocks, kept sorted
/// by smallest element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    ground: SubsetV,
    blocks: Vec<SubsetV>,
}

impl Partition {
    pub fn new(ground: SubsetV, mut blocks: Vec<SubsetV>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut total = 0usize;
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::MalformedPartition);
            }
            total += b.len();
            for v in b.iter() {
                if !ground.contains(v) || !seen.insert(v) {
                    return Err(Error::MalformedPartition);
                }
            }
        }
        if total != ground.len() {
            return Err(Error::MalformedPartition);
        }
        blocks.sort_by_key(|b| b.ids()[0]);
        Ok(Partition { ground, blocks })
    }

    pub fn ground(&self) -> &SubsetV {
        &self.ground
    }

    pub fn blocks(&self) -> &[SubsetV] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// True when every block of `self` lies inside a single block of
    /// `coarse`. Both partitions must share the ground set.
    pub fn refines(&self, coarse: &Partition) -> Result<bool> {
        if self.ground != coarse.ground {
            return Err(Error::GroundMismatch);
        }
        // Map each element to its coarse block index.
        let mut owner = BTreeMap::new();
        for (i, b) in coarse.blocks.iter().enumerate() {
            for v in b.iter() {
                owner.insert(v, i);
            }
        }
        for b in &self.blocks {
            let first = owner[&b.ids()[0]];
            if b.iter().any(|v| owner[&v] != first) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// The partition discovered for one candidate separator, along with the
/// split threshold that produced it.
#[derive(Debug, Clone)]
pub struct SeparatorEntry {
    pub separator: SubsetV,
    pub partition: Partition,
    pub threshold: f64,
}

/// One [`SeparatorEntry`] per candidate separator of size at most `k`,
/// including the empty separator.
#[derive(Debug, Clone)]
pub struct PartitionFamily {
    n: usize,
    k: usize,
    entries: BTreeMap<SubsetV, SeparatorEntry>,
    oracle_calls: u64,
}

impl PartitionFamily {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, separator: &SubsetV) -> Option<&SeparatorEntry> {
        self.entries.get(separator)
    }

    pub fn entries(&self) -> impl Iterator<Item = &SeparatorEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total number of set-function evaluations spent building the family.
    pub fn oracle_calls(&self) -> u64 {
        self.oracle_calls
    }

    /// Replaces every partition by the all-singletons partition. Useful for
    /// experiments: a family of singletons is compatible with everything.
    pub fn to_singletons(&self) -> PartitionFamily {
        let entries = self
            .entries
            .iter()
            .map(|(s, e)| {
                let blocks = e.partition.ground().iter().map(SubsetV::singleton).collect();
                let partition = Partition::new(e.partition.ground().clone(), blocks)
                    .expect("singletons always form a partition");
                (
                    s.clone(),
                    SeparatorEntry {
                        separator: e.separator.clone(),
                        partition,
                        threshold: e.threshold,
                    },
                )
            })
            .collect();
        PartitionFamily {
            n: self.n,
            k: self.k,
            entries,
            oracle_calls: self.oracle_calls,
        }
    }

    /// Debug dump, one line per separator in lexicographic order:
    /// `S: {ids} | blocks: {..}|{..}`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for e in self.entries.values() {
            out.push_str(&format!(
                "S: {} | blocks: {}\n",
                e.separator, e.partition
            ));
        }
        out
    }
}

/// Splits the residual `V∖S` into blocks none of which admits an internal
/// information cut of value at most `eps`. Deterministic: blocks are scanned
/// sorted by smallest element and the first splittable block splits.
pub fn epsilon_partition(
    h: &EntropyOracle,
    v: &SubsetV,
    s: &SubsetV,
    eps: f64,
) -> Result<Partition> {
    epsilon_partition_counted(h, v, s, eps).map(|(p, _)| p)
}

pub(crate) fn epsilon_partition_counted(
    h: &EntropyOracle,
    v: &SubsetV,
    s: &SubsetV,
    eps: f64,
) -> Result<(Partition, u64)> {
    if !s.is_subset_of(v) {
        return Err(Error::InvalidSubset {
            id: s.ids().iter().find(|&&x| !v.contains(x)).copied().unwrap_or(0),
            n: h.n(),
        });
    }
    let ground = v.minus(s);
    if ground.is_empty() {
        return Err(Error::EmptyResidual);
    }
    let mut blocks: Vec<SubsetV> = vec![ground.clone()];
    let mut calls = 0u64;
    // Blocks whose internal minimum exceeds eps never become splittable
    // again; remember them to avoid re-running the minimizer.
    let mut settled: BTreeSet<SubsetV> = BTreeSet::new();
    'outer: loop {
        blocks.sort_by_key(|b| b.ids()[0]);
        for i in 0..blocks.len() {
            let x = blocks[i].clone();
            if x.len() < 2 || settled.contains(&x) {
                continue;
            }
            let oracle = info_cut_oracle(h, &x.union(s), s)?;
            let cut = queyranne_minimize(&oracle)?;
            calls += oracle.call_count();
            if cut.value <= eps {
                let rest = x.minus(&cut.set);
                blocks[i] = cut.set;
                blocks.push(rest);
                continue 'outer;
            }
            settled.insert(x);
        }
        break;
    }
    Ok((Partition::new(ground, blocks)?, calls))
}

/// Builds the full candidate family: one partition for every separator
/// `S` with `|S| <= k` (including `S = ∅`) that leaves at least one
/// residual variable, each at threshold `eps2 + (n + 2) * eps1`.
pub fn build_family(
    h: &EntropyOracle,
    k: usize,
    eps1: f64,
    eps2: f64,
) -> Result<PartitionFamily> {
    let n = h.n();
    let threshold = eps2 + (n as f64 + 2.0) * eps1;
    let full = SubsetV::full(n);
    let mut entries = BTreeMap::new();
    let mut oracle_calls = 0u64;
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    while let Some(ids) = stack.pop() {
        if ids.len() < k {
            let lo = ids.last().map_or(0, |&x| x + 1);
            for next in lo..n {
                let mut bigger = ids.clone();
                bigger.push(next);
                stack.push(bigger);
            }
        }
        if ids.len() > k || ids.len() == n {
            continue;
        }
        let separator = SubsetV::new(ids).expect("generated in increasing order");
        let (partition, calls) = epsilon_partition_counted(h, &full, &separator, threshold)?;
        oracle_calls += calls;
        entries.insert(
            separator.clone(),
            SeparatorEntry {
                separator,
                partition,
                threshold,
            },
        );
    }
    Ok(PartitionFamily {
        n,
        k,
        entries,
        oracle_calls,
    })
}

/// Largest conditional mutual information between two distinct blocks of
/// `pi`, given `s`. Zero for single-block partitions.
pub fn max_pairwise_cmi(p: &JointTable, pi: &Partition, s: &SubsetV) -> Result<f64> {
    let mut best = 0.0f64;
    for i in 0..pi.blocks().len() {
        for j in (i + 1)..pi.blocks().len() {
            let cmi = p.cond_mutual_info(&pi.blocks()[i], &pi.blocks()[j], s)?;
            best = best.max(cmi);
        }
    }
    Ok(best)
}
