//! Plug-in entropy estimation from i.i.d. samples, with a closed-form sample
//! budget, plus the memoized entropy oracle shared by every set-function
//! query downstream. One sample set serves all queries against a source.

use std::collections::BTreeMap;
use std::sync::Mutex;

use crate::discrete::{JointTable, SubsetV, VarSet};
use crate::error::{Error, Result};

/// An i.i.d. sample table: one row per draw, one column per variable.
#[derive(Debug, Clone)]
pub struct SampleSet {
    vars: VarSet,
    rows: Vec<Vec<usize>>,
}

impl SampleSet {
    pub fn new(vars: VarSet, rows: Vec<Vec<usize>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptySampleSet);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != vars.n() {
                return Err(Error::SizeMismatch {
                    got: row.len(),
                    want: vars.n(),
                });
            }
            for (v, &x) in row.iter().enumerate() {
                if x >= vars.card(v) {
                    return Err(Error::SampleOutOfRange {
                        row: i,
                        value: x,
                        card: vars.card(v),
                    });
                }
            }
        }
        Ok(SampleSet { vars, rows })
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Accuracy target for entropy queries answered from one sample set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorBudget {
    pub eps1: f64,
    pub delta1: f64,
    pub m: u64,
}

impl EstimatorBudget {
    pub fn new(n: usize, max_card: usize, eps1: f64, delta1: f64) -> Result<Self> {
        let m = required_samples(n, max_card, eps1, delta1)?;
        Ok(EstimatorBudget { eps1, delta1, m })
    }
}

/// Closed-form sample budget for the plug-in entropy estimator: the least
/// fixed point of
///
/// ```text
/// m = ceil( 2 * n^2 * log2(max_card * m)^2 / eps1^2 * ln(2 / delta1) )
/// ```
///
/// The `log2(max_card * m)` factor tracks how much one resampled row can move
/// the plug-in entropy of any marginal on up to `n` variables; the rest is a
/// standard bounded-differences tail. The fixed point exists because the
/// right-hand side grows only polylogarithmically in `m`, and iterating from
/// below converges to it. The result is monotone: it decreases when `eps1`
/// or `delta1` grow.
pub fn required_samples(n: usize, max_card: usize, eps1: f64, delta1: f64) -> Result<u64> {
    if n == 0 || max_card < 2 {
        return Err(Error::InvalidBudget(format!(
            "n = {n}, max_card = {max_card}"
        )));
    }
    if eps1.is_nan() || eps1 <= 0.0 {
        return Err(Error::InvalidBudget(format!("eps1 = {eps1}")));
    }
    if !(delta1 > 0.0 && delta1 < 1.0) {
        return Err(Error::InvalidBudget(format!("delta1 = {delta1}")));
    }
    let scale = 2.0 * (n as f64).powi(2) / eps1.powi(2) * (2.0 / delta1).ln();
    let step = |m: u64| -> u64 {
        let l = (max_card as f64 * m as f64).log2();
        (scale * l * l).ceil() as u64
    };
    let mut m = 1u64;
    loop {
        let next = step(m);
        if next <= m {
            return Ok(m);
        }
        m = next;
    }
}

/// Empirical joint table: cell counts divided by the number of rows.
pub fn empirical_table(s: &SampleSet) -> Result<JointTable> {
    let cells = s.vars.cell_count()?;
    let mut counts = vec![0u64; cells];
    let n = s.vars.n();
    for row in &s.rows {
        let mut idx = 0usize;
        for (v, &x) in row.iter().enumerate().take(n) {
            idx = idx * s.vars.card(v) + x;
        }
        counts[idx] += 1;
    }
    let m = s.rows.len() as f64;
    let probs = counts.iter().map(|&c| c as f64 / m).collect();
    JointTable::new(s.vars.clone(), probs)
}

/// Plug-in entropy of the empirical marginal over `a`, in bits. Counts the
/// projected rows directly, so no dense table over the full variable set is
/// ever built.
pub fn estimate_entropy(s: &SampleSet, a: &SubsetV) -> Result<f64> {
    if let Some(&id) = a.ids().last() {
        if id >= s.vars.n() {
            return Err(Error::InvalidSubset { id, n: s.vars.n() });
        }
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let mut counts: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    for row in &s.rows {
        let key: Vec<usize> = a.iter().map(|v| row[v]).collect();
        *counts.entry(key).or_insert(0) += 1;
    }
    let m = s.rows.len() as f64;
    let mut h = 0.0f64;
    for &c in counts.values() {
        let p = c as f64 / m;
        h -= p * p.log2();
    }
    Ok(h.max(0.0))
}

enum OracleSource {
    Exact(JointTable),
    Empirical(SampleSet),
}

/// Deterministic, memoized entropy oracle over subsets of one variable set.
/// Backed either by an exact joint table or by a fixed sample set; repeated
/// queries for the same subset return bit-identical results.
pub struct EntropyOracle {
    source: OracleSource,
    cache: Mutex<BTreeMap<SubsetV, f64>>,
}

impl EntropyOracle {
    pub fn exact(table: JointTable) -> Self {
        EntropyOracle {
            source: OracleSource::Exact(table),
            cache: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn from_samples(samples: SampleSet) -> Self {
        EntropyOracle {
            source: OracleSource::Empirical(samples),
            cache: Mutex::new(BTreeMap::new()),
        }
    }

    /// Number of variables the oracle answers queries about.
    pub fn n(&self) -> usize {
        match &self.source {
            OracleSource::Exact(t) => t.n(),
            OracleSource::Empirical(s) => s.vars().n(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.source, OracleSource::Exact(_))
    }

    /// Entropy (bits) of the marginal over `a`, memoized per subset.
    pub fn entropy(&self, a: &SubsetV) -> Result<f64> {
        if let Some(&h) = self.cache.lock().unwrap().get(a) {
            return Ok(h);
        }
        let h = match &self.source {
            OracleSource::Exact(t) => t.entropy(a)?,
            OracleSource::Empirical(s) => estimate_entropy(s, a)?,
        };
        self.cache.lock().unwrap().insert(a.clone(), h);
        Ok(h)
    }

    /// Conditional mutual information `I(A; B | S)` through the oracle.
    pub fn cond_mutual_info(&self, a: &SubsetV, b: &SubsetV, s: &SubsetV) -> Result<f64> {
        if !a.is_disjoint_from(b) || !a.is_disjoint_from(s) || !b.is_disjoint_from(s) {
            return Err(Error::OverlappingSets);
        }
        let h_as = self.entropy(&a.union(s))?;
        let h_bs = self.entropy(&b.union(s))?;
        let h_abs = self.entropy(&a.union(b).union(s))?;
        let h_s = self.entropy(s)?;
        Ok((h_as + h_bs - h_abs - h_s).max(0.0))
    }
}
