//! Dense joint probability tables over small discrete variable sets, and the
//! information measures the rest of the crate is built on. All entropies and
//! divergences are in bits.

use crate::error::{Error, Result};

/// Hard cap on the number of cells a dense table may hold.
pub const MAX_TABLE_CELLS: usize = 1 << 24;

/// Tolerance used when checking that probabilities sum to one.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Neumaier compensated accumulator. The learning pipeline compares
/// information quantities against thresholds near 1e-12, so summation error
/// must stay a few ulps regardless of how many cells a table has.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Accum {
    sum: f64,
    comp: f64,
}

impl Accum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// An ordered list of discrete variables, identified by position `0..n`,
/// each with a finite cardinality of at least two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarSet {
    cards: Vec<usize>,
}

impl VarSet {
    pub fn new(cards: Vec<usize>) -> Result<Self> {
        if cards.is_empty() {
            return Err(Error::EmptyVarSet);
        }
        if let Some(&c) = cards.iter().find(|&&c| c < 2) {
            return Err(Error::InvalidCardinality(c));
        }
        Ok(VarSet { cards })
    }

    /// Uniform cardinality helper: `n` variables with `card` states each.
    pub fn uniform(n: usize, card: usize) -> Result<Self> {
        VarSet::new(vec![card; n])
    }

    pub fn n(&self) -> usize {
        self.cards.len()
    }

    pub fn card(&self, v: usize) -> usize {
        self.cards[v]
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    /// Number of joint assignments, checked against [`MAX_TABLE_CELLS`].
    pub fn cell_count(&self) -> Result<usize> {
        let mut cells: u128 = 1;
        for &c in &self.cards {
            cells *= c as u128;
            if cells > MAX_TABLE_CELLS as u128 {
                return Err(Error::TableTooLarge {
                    cells,
                    cap: MAX_TABLE_CELLS,
                });
            }
        }
        Ok(cells as usize)
    }
}

/// A subset of variable ids, held strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SubsetV(Vec<usize>);

impl SubsetV {
    /// Builds from an already sorted, duplicate-free id list.
    pub fn new(ids: Vec<usize>) -> Result<Self> {
        for w in ids.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::UnsortedSubset(w[1], w[0]));
            }
        }
        Ok(SubsetV(ids))
    }

    /// Builds from an arbitrary id list, sorting and deduplicating.
    pub fn from_ids(mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        SubsetV(ids)
    }

    pub fn empty() -> Self {
        SubsetV(Vec::new())
    }

    /// The full set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        SubsetV((0..n).collect())
    }

    pub fn singleton(v: usize) -> Self {
        SubsetV(vec![v])
    }

    pub fn ids(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_subset_of(&self, other: &SubsetV) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }

    pub fn is_disjoint_from(&self, other: &SubsetV) -> bool {
        self.0.iter().all(|&v| !other.contains(v))
    }

    pub fn union(&self, other: &SubsetV) -> SubsetV {
        let mut ids = self.0.clone();
        ids.extend_from_slice(&other.0);
        SubsetV::from_ids(ids)
    }

    pub fn minus(&self, other: &SubsetV) -> SubsetV {
        SubsetV(self.0.iter().copied().filter(|&v| !other.contains(v)).collect())
    }

    pub fn intersect(&self, other: &SubsetV) -> SubsetV {
        SubsetV(self.0.iter().copied().filter(|&v| other.contains(v)).collect())
    }

    pub fn insert(&self, v: usize) -> SubsetV {
        if self.contains(v) {
            self.clone()
        } else {
            let mut ids = self.0.clone();
            ids.push(v);
            ids.sort_unstable();
            SubsetV(ids)
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    fn check_range(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&id) if id >= n => Err(Error::InvalidSubset { id, n }),
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for SubsetV {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// A dense joint table. Cells are stored row-major with the **last** variable
/// varying fastest; cell `i` of a marginal over subset `A` refers to the
/// assignment of `A`'s variables in increasing-id order.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    vars: VarSet,
    probs: Vec<f64>,
}

impl JointTable {
    pub fn new(vars: VarSet, probs: Vec<f64>) -> Result<Self> {
        let want = vars.cell_count()?;
        if probs.len() != want {
            return Err(Error::SizeMismatch {
                got: probs.len(),
                want,
            });
        }
        Ok(JointTable { vars, probs })
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn n(&self) -> usize {
        self.vars.n()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Checks nonnegativity and normalization within [`NORMALIZATION_TOL`].
    pub fn validate(&self) -> Result<()> {
        for (i, &p) in self.probs.iter().enumerate() {
            // rejects NaN as well as negatives
            if p.is_nan() || p < 0.0 {
                return Err(Error::NegativeProbability(p, i));
            }
        }
        let mut sum = Accum::default();
        self.probs.iter().for_each(|&p| sum.add(p));
        let sum = sum.total();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(sum));
        }
        Ok(())
    }

    /// Strides for flat indexing; the last variable has stride 1.
    fn strides(&self) -> Vec<usize> {
        let n = self.vars.n();
        let mut s = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.vars.card(i + 1);
        }
        s
    }

    /// Decodes flat cell index `idx` into per-variable values.
    pub fn decode(&self, mut idx: usize) -> Vec<usize> {
        let n = self.vars.n();
        let mut assignment = vec![0usize; n];
        for i in (0..n).rev() {
            let c = self.vars.card(i);
            assignment[i] = idx % c;
            idx /= c;
        }
        assignment
    }

    /// Encodes a full assignment into its flat cell index.
    pub fn encode(&self, assignment: &[usize]) -> usize {
        let strides = self.strides();
        assignment
            .iter()
            .zip(strides.iter())
            .map(|(&x, &s)| x * s)
            .sum()
    }

    /// Sums out every variable not in `a`. The result is a table over a fresh
    /// variable set in which position `i` corresponds to `a.ids()[i]`.
    pub fn marginalize(&self, a: &SubsetV) -> Result<JointTable> {
        a.check_range(self.n())?;
        if a.is_empty() {
            // Zero-variable marginal: a single cell holding the total mass.
            let mut total = Accum::default();
            self.probs.iter().for_each(|&p| total.add(p));
            return Ok(JointTable {
                vars: VarSet { cards: Vec::new() },
                probs: vec![total.total()],
            });
        }
        let kept: Vec<usize> = a.ids().to_vec();
        let out_cards: Vec<usize> = kept.iter().map(|&v| self.vars.card(v)).collect();
        let out_vars = VarSet::new(out_cards)?;
        let out_cells = out_vars.cell_count()?;
        let mut out = vec![Accum::default(); out_cells];

        // Strides of the kept variables inside the output table.
        let m = kept.len();
        let mut out_strides = vec![1usize; m];
        for i in (0..m - 1).rev() {
            out_strides[i] = out_strides[i + 1] * out_vars.card(i + 1);
        }

        let n = self.n();
        let mut assignment = vec![0usize; n];
        for (idx, &p) in self.probs.iter().enumerate() {
            let mut target = 0usize;
            for (j, &v) in kept.iter().enumerate() {
                target += assignment[v] * out_strides[j];
            }
            out[target].add(p);
            // Odometer increment keeps the decode incremental.
            if idx + 1 < self.probs.len() {
                for i in (0..n).rev() {
                    assignment[i] += 1;
                    if assignment[i] == self.vars.card(i) {
                        assignment[i] = 0;
                    } else {
                        break;
                    }
                }
            }
        }
        Ok(JointTable {
            vars: out_vars,
            probs: out.iter().map(Accum::total).collect(),
        })
    }

    /// Shannon entropy of the marginal over `a`, in bits. `H(∅) = 0`.
    pub fn entropy(&self, a: &SubsetV) -> Result<f64> {
        let marginal = self.marginalize(a)?;
        let mut h = Accum::default();
        for &p in &marginal.probs {
            if p > 0.0 {
                h.add(-p * p.log2());
            }
        }
        Ok(h.total().max(0.0))
    }

    /// Conditional mutual information `I(A; B | S)` in bits, for pairwise
    /// disjoint subsets. Computed as `H(AS) + H(BS) - H(ABS) - H(S)` and
    /// clamped to be nonnegative.
    pub fn cond_mutual_info(&self, a: &SubsetV, b: &SubsetV, s: &SubsetV) -> Result<f64> {
        a.check_range(self.n())?;
        b.check_range(self.n())?;
        s.check_range(self.n())?;
        if !a.is_disjoint_from(b) || !a.is_disjoint_from(s) || !b.is_disjoint_from(s) {
            return Err(Error::OverlappingSets);
        }
        let h_as = self.entropy(&a.union(s))?;
        let h_bs = self.entropy(&b.union(s))?;
        let h_abs = self.entropy(&a.union(b).union(s))?;
        let h_s = self.entropy(s)?;
        Ok((h_as + h_bs - h_abs - h_s).max(0.0))
    }

    /// Kullback-Leibler divergence `D(self || q)` in bits. Returns `+inf`
    /// when `self` puts mass where `q` has none.
    pub fn kl_divergence(&self, q: &JointTable) -> Result<f64> {
        if self.vars != q.vars {
            return Err(Error::ShapeMismatch);
        }
        let mut d = Accum::default();
        for (&p, &qv) in self.probs.iter().zip(q.probs.iter()) {
            if p > 0.0 {
                if qv <= 0.0 {
                    return Ok(f64::INFINITY);
                }
                d.add(p * (p / qv).log2());
            }
        }
        Ok(d.total())
    }
}
