//! Minimization of symmetric submodular set functions by Queyranne's
//! pendant-pair contraction scheme, with a call-counted oracle wrapper and
//! the information-cut oracle used for conditional-independence discovery.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::discrete::SubsetV;
use crate::error::{Error, Result};
use crate::estimation::EntropyOracle;

type BoxedSetFn<'a> = Box<dyn Fn(&[usize]) -> f64 + 'a>;

/// A set function given by evaluation only. Every call through [`eval`]
/// is counted, which the complexity tests rely on.
///
/// [`eval`]: SetFunctionOracle::eval
pub struct SetFunctionOracle<'a> {
    ground: Vec<usize>,
    f: BoxedSetFn<'a>,
    calls: AtomicU64,
}

impl<'a> SetFunctionOracle<'a> {
    /// `ground` lists the element ids; `f` receives subsets as sorted id
    /// slices and must be deterministic.
    pub fn new(ground: Vec<usize>, f: impl Fn(&[usize]) -> f64 + 'a) -> Self {
        SetFunctionOracle {
            ground,
            f: Box::new(f),
            calls: AtomicU64::new(0),
        }
    }

    /// Adds seeded noise, bounded by `bound`, to every value of `inner`.
    /// The perturbation depends only on the subset, so the result is still
    /// a deterministic set function.
    pub fn with_bounded_noise(
        inner: SetFunctionOracle<'a>,
        bound: f64,
        seed: u64,
    ) -> SetFunctionOracle<'a> {
        let ground = inner.ground.clone();
        let positions = ground.clone();
        let f = move |s: &[usize]| -> f64 {
            let mut mask = 0u64;
            for &v in s {
                let bit = positions.iter().position(|&g| g == v).unwrap();
                mask |= 1 << bit;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ mask.wrapping_mul(0x9e3779b97f4a7c15));
            let noise = rng.gen_range(-bound..=bound);
            inner.eval(s) + noise
        };
        SetFunctionOracle {
            ground,
            f: Box::new(f),
            calls: AtomicU64::new(0),
        }
    }

    pub fn ground(&self) -> &[usize] {
        &self.ground
    }

    /// Evaluates the function on a sorted subset of the ground set.
    pub fn eval(&self, subset: &[usize]) -> f64 {
        self.calls.fetch_add(1, Ordering::Relaxed);
        (self.f)(subset)
    }

    pub fn call_count(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

/// Result of one pendant-pair sweep: `f` restricted to sets separating
/// `u` from `t` is minimized by the singleton `{u}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PendantPair {
    pub t: usize,
    pub u: usize,
}

/// A minimizing nonempty proper subset together with its value.
#[derive(Debug, Clone, PartialEq)]
pub struct MinCutResult {
    pub set: SubsetV,
    pub value: f64,
}

fn union_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(a);
    out.extend_from_slice(b);
    out.sort_unstable();
    out
}

/// One pendant-pair sweep over `clusters`; values come from `f` applied to
/// the union of a cluster's members. Returns indices into `clusters` of
/// `(t, u)` = the last two clusters added to the ordering.
fn pendant_pair_clusters(f: &SetFunctionOracle, clusters: &[Vec<usize>]) -> (usize, usize) {
    let k = clusters.len();
    debug_assert!(k >= 2);
    let mut in_order = vec![false; k];
    // Start from the cluster holding the lowest element id; clusters are
    // kept sorted by smallest member, so that is cluster 0.
    in_order[0] = true;
    let mut order = vec![0usize];
    let mut w: Vec<usize> = clusters[0].clone();
    for _ in 1..k {
        let mut best: Option<(f64, usize)> = None;
        for (c, members) in clusters.iter().enumerate() {
            if in_order[c] {
                continue;
            }
            let key = f.eval(&union_sorted(&w, members)) - f.eval(members);
            match best {
                Some((b, _)) if key >= b => {}
                _ => best = Some((key, c)),
            }
        }
        let (_, c) = best.unwrap();
        in_order[c] = true;
        order.push(c);
        w = union_sorted(&w, &clusters[c]);
    }
    (order[k - 2], order[k - 1])
}

/// Pendant pair of `f` over its full ground set: after the sweep, `{u}`
/// minimizes `f` among all sets containing `u` but not `t`.
pub fn pendant_pair(f: &SetFunctionOracle) -> Result<PendantPair> {
    if f.ground().len() < 2 {
        return Err(Error::GroundTooSmall);
    }
    let mut ground: Vec<usize> = f.ground().to_vec();
    ground.sort_unstable();
    let clusters: Vec<Vec<usize>> = ground.iter().map(|&v| vec![v]).collect();
    let (t, u) = pendant_pair_clusters(f, &clusters);
    Ok(PendantPair {
        t: clusters[t][0],
        u: clusters[u][0],
    })
}

/// Queyranne's algorithm: exact minimization of a symmetric submodular
/// function over nonempty proper subsets, using at most `|ground|^3`
/// oracle calls.
pub fn queyranne_minimize(f: &SetFunctionOracle) -> Result<MinCutResult> {
    let mut ground: Vec<usize> = f.ground().to_vec();
    ground.sort_unstable();
    if ground.len() < 2 {
        return Err(Error::GroundTooSmall);
    }
    let mut clusters: Vec<Vec<usize>> = ground.iter().map(|&v| vec![v]).collect();
    let mut best: Option<MinCutResult> = None;
    while clusters.len() >= 2 {
        let (t, u) = pendant_pair_clusters(f, &clusters);
        let candidate = clusters[u].clone();
        let value = f.eval(&candidate);
        // Strict improvement only: on ties the first recorded candidate wins.
        if best.as_ref().is_none_or(|b| value < b.value) {
            best = Some(MinCutResult {
                set: SubsetV::new(candidate.clone()).expect("cluster members are sorted"),
                value,
            });
        }
        // Contract u into t; cluster order stays sorted by smallest member.
        let merged = union_sorted(&clusters[t], &clusters[u]);
        clusters[t] = merged;
        clusters.remove(u);
        clusters.sort_by_key(|c| c[0]);
    }
    Ok(best.expect("at least one contraction happened"))
}

/// Exhaustive minimizer over nonempty proper subsets, for cross-checking.
/// Ties break toward smaller sets, then lexicographically smaller id lists.
pub fn brute_force_minimize(f: &SetFunctionOracle) -> Result<MinCutResult> {
    let mut ground: Vec<usize> = f.ground().to_vec();
    ground.sort_unstable();
    let n = ground.len();
    if n < 2 {
        return Err(Error::GroundTooSmall);
    }
    if n > 20 {
        return Err(Error::GroundTooLarge(n));
    }
    let mut best: Option<MinCutResult> = None;
    for mask in 1u64..((1u64 << n) - 1) {
        let subset: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| ground[i]).collect();
        let value = f.eval(&subset);
        let better = match &best {
            None => true,
            Some(b) => {
                value < b.value
                    || (value == b.value
                        && (subset.len() < b.set.len()
                            || (subset.len() == b.set.len() && subset.as_slice() < b.set.ids())))
            }
        };
        if better {
            best = Some(MinCutResult {
                set: SubsetV::new(subset).expect("mask order is sorted"),
                value,
            });
        }
    }
    Ok(best.expect("n >= 2 gives at least one proper subset"))
}

/// The residual information-cut function `A ↦ I(A; (V∖S)∖A | S)` over the
/// ground set `V∖S`, evaluated through the entropy oracle. It is symmetric
/// and, for exact oracles, submodular; its value is computed so that a set
/// and its complement follow the identical arithmetic path.
pub fn info_cut_oracle<'a>(
    h: &'a EntropyOracle,
    v: &SubsetV,
    s: &SubsetV,
) -> Result<SetFunctionOracle<'a>> {
    if let Some(&id) = v.ids().last() {
        if id >= h.n() {
            return Err(Error::InvalidSubset { id, n: h.n() });
        }
    }
    if !s.is_subset_of(v) {
        return Err(Error::InvalidSubset {
            id: s.ids().iter().find(|&&x| !v.contains(x)).copied().unwrap_or(0),
            n: h.n(),
        });
    }
    let ground_set = v.minus(s);
    if ground_set.is_empty() {
        return Err(Error::EmptyResidual);
    }
    let s = s.clone();
    let v = v.clone();
    let ground = ground_set.ids().to_vec();
    let f = move |subset: &[usize]| -> f64 {
        let a = SubsetV::new(subset.to_vec()).expect("oracle subsets arrive sorted");
        let b = ground_set.minus(&a);
        let h_as = h.entropy(&a.union(&s)).expect("subset is in range");
        let h_bs = h.entropy(&b.union(&s)).expect("subset is in range");
        let h_v = h.entropy(&v).expect("subset is in range");
        let h_s = h.entropy(&s).expect("subset is in range");
        // + is commutative, so swapping A and B changes nothing bit-wise.
        (h_as + h_bs - h_v - h_s).max(0.0)
    };
    Ok(SetFunctionOracle::new(ground, f))
}
