//! Projection of a distribution onto a tree decomposition: the closest
//! factorizing distribution in KL divergence has the closed quotient form
//! (product of bag marginals over product of separator marginals), and its
//! divergence from the original equals the sum of separator conditional
//! mutual informations. Also hosts the end-to-end learning pipeline.

use crate::discrete::{JointTable, SubsetV, VarSet};
use crate::error::{Error, Result};
use crate::estimation::{empirical_table, required_samples, EntropyOracle, SampleSet};
use crate::partitions::{build_family, PartitionFamily};
use crate::treedecomp::{find_compatible_td, TreeDecomposition};

/// A distribution represented by a tree decomposition together with the
/// bag and separator marginals of some joint table. Marginal `i` is over
/// `td.bags[i]`; separator marginal `e` is over the intersection of the
/// endpoints of `td.edges[e]`.
#[derive(Debug, Clone)]
pub struct FactorizedModel {
    pub td: TreeDecomposition,
    pub vars: VarSet,
    pub bag_marginals: Vec<JointTable>,
    pub sep_marginals: Vec<JointTable>,
}

impl FactorizedModel {
    /// Expands the model into an explicit joint table via the quotient
    /// formula, with `0/0 := 0`. Fails when the marginals could not have
    /// come from one distribution.
    pub fn materialize(&self) -> Result<JointTable> {
        let n = self.vars.n();
        let cells = self.vars.cell_count()?;
        let seps: Vec<SubsetV> = self
            .td
            .edges
            .iter()
            .map(|&(i, j)| self.td.bags[i].intersect(&self.td.bags[j]))
            .collect();
        let mut probs = vec![0.0f64; cells];
        let mut assignment = vec![0usize; n];
        for (idx, cell) in probs.iter_mut().enumerate() {
            let restrict = |set: &SubsetV, table: &JointTable| -> f64 {
                let values: Vec<usize> = set.iter().map(|v| assignment[v]).collect();
                table.probs()[table.encode(&values)]
            };
            let mut num = 1.0f64;
            for (bag, marg) in self.td.bags.iter().zip(&self.bag_marginals) {
                num *= restrict(bag, marg);
            }
            let mut den = 1.0f64;
            for (sep, marg) in seps.iter().zip(&self.sep_marginals) {
                den *= restrict(sep, marg);
            }
            *cell = if den > 0.0 {
                num / den
            } else if num == 0.0 {
                0.0
            } else {
                return Err(Error::InconsistentModel);
            };
            if idx + 1 < cells {
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
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::InconsistentModel);
        }
        JointTable::new(self.vars.clone(), probs)
    }
}

/// Computes the bag and separator marginals of `p` for `td`: the KL-closest
/// distribution factorizing over `td`.
pub fn project(p: &JointTable, td: &TreeDecomposition) -> Result<FactorizedModel> {
    let n = p.n();
    td.validate(n)?;
    let bag_marginals = td
        .bags
        .iter()
        .map(|b| p.marginalize(b))
        .collect::<Result<Vec<_>>>()?;
    let sep_marginals = td
        .edges
        .iter()
        .map(|&(i, j)| p.marginalize(&td.bags[i].intersect(&td.bags[j])))
        .collect::<Result<Vec<_>>>()?;
    Ok(FactorizedModel {
        td: td.clone(),
        vars: p.vars().clone(),
        bag_marginals,
        sep_marginals,
    })
}

/// Divergence from `p` to its projection onto `td`, accounted as one
/// conditional mutual information per tree edge: with the tree rooted at
/// bag 0, each edge contributes the information between the child bag's
/// new vertices and everything accumulated before it, given the edge
/// separator. The terms telescope, so the sum equals the divergence
/// against the materialized projection exactly.
///
/// Summing instead the information between the two full sides of each
/// edge overcounts: the sides of different edges overlap, and the excess
/// is the cross-branch information the factorization never claimed to
/// capture.
pub fn projection_kl(p: &JointTable, td: &TreeDecomposition) -> Result<f64> {
    let n = p.n();
    td.validate(n)?;
    let m = td.bags.len();
    let mut adj = vec![Vec::new(); m];
    for &(i, j) in &td.edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    adj.iter_mut().for_each(|a| a.sort_unstable());
    let mut total = 0.0f64;
    let mut seen_vars = td.bags[0].clone();
    let mut visited = vec![false; m];
    visited[0] = true;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(b) = queue.pop_front() {
        for &c in &adj[b] {
            if visited[c] {
                continue;
            }
            visited[c] = true;
            // Running intersection: the child bag meets everything seen so
            // far exactly in the edge separator.
            let sep = td.bags[c].intersect(&td.bags[b]);
            let fresh = td.bags[c].minus(&seen_vars);
            let earlier = seen_vars.minus(&sep);
            if !fresh.is_empty() && !earlier.is_empty() {
                total += p.cond_mutual_info(&fresh, &earlier, &sep)?;
            }
            seen_vars = seen_vars.union(&td.bags[c]);
            queue.push_back(c);
        }
    }
    Ok(total)
}

/// User-facing learning parameters. The internal split thresholds are
/// derived from these unless explicitly overridden.
#[derive(Debug, Clone)]
pub struct LearnConfig {
    /// Width bound for the decomposition.
    pub k: usize,
    /// Target divergence of the learned model, in bits.
    pub eps: f64,
    /// Target failure probability in sample mode.
    pub delta: f64,
    /// Assumed strong-connectivity floor in bits; defaults to `eps`.
    pub alpha: Option<f64>,
    /// Replaces the derived per-query entropy accuracy.
    pub eps1_override: Option<f64>,
    /// Replaces the derived partition threshold component.
    pub eps2_override: Option<f64>,
}

/// The tolerances actually used by a learning run.
#[derive(Debug, Clone, Copy)]
pub struct DerivedTolerances {
    pub eps1: f64,
    pub eps2: f64,
    pub delta1: f64,
    /// Split threshold handed to the partition search:
    /// `eps2 + (n + 2) * eps1`.
    pub threshold: f64,
    /// Samples needed to support `eps1`/`delta1`; `None` with an exact
    /// oracle or an `eps1` of zero.
    pub required_m: Option<u64>,
}

impl LearnConfig {
    pub fn new(k: usize, eps: f64, delta: f64) -> Self {
        LearnConfig {
            k,
            eps,
            delta,
            alpha: None,
            eps1_override: None,
            eps2_override: None,
        }
    }

    /// Resolves the internal tolerances for a ground set of `n` variables.
    /// The derived scale is half of `min(eps, alpha) / (4 n^4)`, keeping
    /// the strict inequality the divergence bound needs; an exact oracle
    /// has no estimation error, so `eps1 = 0` there.
    pub fn derived(&self, n: usize, max_card: usize, exact: bool) -> Result<DerivedTolerances> {
        if self.eps <= 0.0 || !self.eps.is_finite() {
            return Err(Error::InvalidBudget(format!("eps must be positive, got {}", self.eps)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidBudget(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        if let Some(a) = self.alpha {
            if a <= 0.0 || !a.is_finite() {
                return Err(Error::InvalidBudget(format!("alpha must be positive, got {a}")));
            }
        }
        for (name, o) in [("eps1", self.eps1_override), ("eps2", self.eps2_override)] {
            if let Some(v) = o {
                if v < 0.0 || !v.is_finite() {
                    return Err(Error::InvalidBudget(format!(
                        "{name} override must be nonnegative, got {v}"
                    )));
                }
            }
        }
        let nf = n as f64;
        let scale = self.eps.min(self.alpha.unwrap_or(self.eps)) / (8.0 * nf.powi(4));
        let eps1 = self
            .eps1_override
            .unwrap_or(if exact { 0.0 } else { scale });
        let eps2 = self.eps2_override.unwrap_or(scale);
        let delta1 = self.delta / nf.powi(5);
        let required_m = if eps1 > 0.0 {
            Some(required_samples(n, max_card, eps1, delta1)?)
        } else {
            None
        };
        Ok(DerivedTolerances {
            eps1,
            eps2,
            delta1,
            threshold: eps2 + (nf + 2.0) * eps1,
            required_m,
        })
    }
}

/// What the learner reads: a full table, or samples from one.
#[derive(Debug, Clone)]
pub enum LearnSource {
    Exact(JointTable),
    Samples(SampleSet),
}

/// A successful learning run.
#[derive(Debug, Clone)]
pub struct Learned {
    pub td: TreeDecomposition,
    pub model: FactorizedModel,
    pub family: PartitionFamily,
    pub tolerances: DerivedTolerances,
    /// Divergence of the source table (empirical, in sample mode) from its
    /// projection onto `td`, in bits.
    pub kl: f64,
}

/// End-to-end pipeline: build an entropy oracle, discover the partition
/// family, search for a compatible decomposition, and project.
pub fn learn(source: &LearnSource, cfg: &LearnConfig) -> Result<Learned> {
    let (oracle, table, exact) = match source {
        LearnSource::Exact(p) => {
            p.validate()?;
            (EntropyOracle::exact(p.clone()), p.clone(), true)
        }
        LearnSource::Samples(s) => {
            let table = empirical_table(s)?;
            (EntropyOracle::from_samples(s.clone()), table, false)
        }
    };
    let n = oracle.n();
    let max_card = (0..n).map(|v| table.vars().card(v)).max().unwrap_or(2);
    let tolerances = cfg.derived(n, max_card, exact)?;
    let family = build_family(&oracle, cfg.k, tolerances.eps1, tolerances.eps2)?;
    let td = find_compatible_td(&family)?;
    let model = project(&table, &td)?;
    let kl = projection_kl(&table, &td)?;
    Ok(Learned { td, model, family, tolerances, kl })
}
