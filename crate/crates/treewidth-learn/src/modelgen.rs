//! Ground-truth generators for testing and experiments: random bounded-width
//! decompositions, distributions that factorize exactly over them with
//! tunable dependence, a seeded sampler, and a brute-force meter for the
//! strong-connectivity floor.

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::discrete::{JointTable, SubsetV, VarSet};
use crate::error::{Error, Result};
use crate::estimation::SampleSet;
use crate::treedecomp::TreeDecomposition;

/// Parameters for one generated model.
#[derive(Debug, Clone, Copy)]
pub struct GeneratorSpec {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    /// Cardinality of every variable.
    pub card: usize,
    /// How far conditionals sit from uniform; must lie in (0, 0.5) so all
    /// conditional probabilities stay strictly inside (0, 1).
    pub dependence_strength: f64,
}

impl GeneratorSpec {
    fn validate(&self) -> Result<()> {
        if self.n < self.k + 1 {
            return Err(Error::InvalidSpec(format!(
                "need n >= k + 1, got n = {}, k = {}",
                self.n, self.k
            )));
        }
        if self.card < 2 {
            return Err(Error::InvalidCardinality(self.card));
        }
        if !(self.dependence_strength > 0.0 && self.dependence_strength < 0.5) {
            return Err(Error::InvalidSpec(format!(
                "dependence_strength must lie in (0, 0.5), got {}",
                self.dependence_strength
            )));
        }
        Ok(())
    }
}

/// Random width-`k` decomposition grown the standard way: a root bag of
/// `k + 1` variables, then each further variable attached to a random
/// `k`-subset of a random existing bag.
pub fn random_ktree_td(spec: &GeneratorSpec) -> Result<TreeDecomposition> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut bags = vec![SubsetV::from_ids((0..=spec.k).collect())];
    let mut edges = Vec::new();
    for v in (spec.k + 1)..spec.n {
        let parent = rng.gen_range(0..bags.len());
        let mut ids = bags[parent].ids().to_vec();
        ids.remove(rng.gen_range(0..ids.len()));
        ids.push(v);
        bags.push(SubsetV::from_ids(ids));
        edges.push((parent, bags.len() - 1));
    }
    let td = TreeDecomposition { bags, edges };
    td.validate(spec.n)?;
    Ok(td)
}

/// A distribution that factorizes exactly over `td`: a product of seeded
/// conditionals, one per variable, following a root-to-leaf traversal.
/// Every conditional probability lies within `dependence_strength` of
/// uniform, so all cells are strictly positive.
pub fn random_factorizing_dist(td: &TreeDecomposition, spec: &GeneratorSpec) -> Result<JointTable> {
    spec.validate()?;
    let n = spec.n;
    td.validate(n)?;
    let vars = VarSet::uniform(n, spec.card)?;
    let cells = vars.cell_count()?;
    // Distinct stream from the one used to grow the decomposition.
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x9e37_79b9_7f4a_7c15);

    // Traversal order over bags; each bag's variables not seen before get
    // a conditional given the bag variables already assigned.
    let m = td.bags.len();
    let mut adj = vec![Vec::new(); m];
    for &(i, j) in &td.edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    adj.iter_mut().for_each(|a| a.sort_unstable());
    let mut order = Vec::with_capacity(n);
    let mut assigned = BTreeSet::new();
    let mut visited = vec![false; m];
    let mut stack = vec![0usize];
    visited[0] = true;
    while let Some(b) = stack.pop() {
        for v in td.bags[b].iter() {
            if assigned.insert(v) {
                let parents: Vec<usize> =
                    td.bags[b].iter().filter(|&u| u != v && assigned.contains(&u)).collect();
                order.push((v, parents));
            }
        }
        for &c in adj[b].iter().rev() {
            if !visited[c] {
                visited[c] = true;
                stack.push(c);
            }
        }
    }

    // One conditional table per variable: for each parent configuration, a
    // distribution over the variable's values.
    let s = spec.dependence_strength;
    let mut conditionals: Vec<(Vec<usize>, Vec<Vec<f64>>)> = Vec::with_capacity(n);
    let mut slot = vec![0usize; n];
    for (pos, (v, parents)) in order.iter().enumerate() {
        slot[*v] = pos;
        let configs = spec.card.pow(parents.len() as u32);
        let mut rows = Vec::with_capacity(configs);
        for _ in 0..configs {
            let mut row: Vec<f64> = if spec.card == 2 {
                let u = rng.gen_range(0.5..=1.0);
                let p1 = if rng.gen_bool(0.5) { 0.5 + s * u } else { 0.5 - s * u };
                vec![1.0 - p1, p1]
            } else {
                (0..spec.card).map(|_| rng.gen_range(0.5 - s..0.5 + s)).collect()
            };
            let total: f64 = row.iter().sum();
            row.iter_mut().for_each(|p| *p /= total);
            rows.push(row);
        }
        conditionals.push((parents.clone(), rows));
    }

    let mut probs = vec![0.0f64; cells];
    let mut assignment = vec![0usize; n];
    for (idx, cell) in probs.iter_mut().enumerate() {
        let mut p = 1.0f64;
        for (v, _) in &order {
            let (parents, rows) = &conditionals[slot[*v]];
            let mut cfg = 0usize;
            for &u in parents {
                cfg = cfg * spec.card + assignment[u];
            }
            p *= rows[cfg][assignment[*v]];
        }
        *cell = p;
        if idx + 1 < cells {
            for i in (0..n).rev() {
                assignment[i] += 1;
                if assignment[i] == spec.card {
                    assignment[i] = 0;
                } else {
                    break;
                }
            }
        }
    }
    JointTable::new(vars, probs)
}

/// Smallest conditional mutual information over the decomposition's
/// separators: for each edge separator `S`, each connected component of the
/// bag graph minus `S` is split every possible way and `I(half; half | S)`
/// measured. Returns `+inf` when no component has two or more variables.
pub fn measure_alpha(p: &JointTable, td: &TreeDecomposition) -> Result<f64> {
    let n = p.n();
    if n > 12 {
        return Err(Error::TooLarge(format!(
            "alpha measurement enumerates bipartitions; n = {n} exceeds 12"
        )));
    }
    td.validate(n)?;
    let g = td.to_chordal(n);
    let mut best = f64::INFINITY;
    let mut seen = BTreeSet::new();
    for es in td.edge_separators(n)? {
        if !seen.insert(es.sep.clone()) {
            continue;
        }
        for comp in g.components_without(&es.sep) {
            let ids = comp.ids();
            if ids.len() < 2 {
                continue;
            }
            for mask in 1u64..(1 << (ids.len() - 1)) {
                let a = SubsetV::from_ids(
                    (0..ids.len()).filter(|&i| mask >> i & 1 == 1).map(|i| ids[i]).collect(),
                );
                let b = comp.minus(&a);
                best = best.min(p.cond_mutual_info(&a, &b, &es.sep)?);
            }
        }
    }
    Ok(best)
}

/// Seeded i.i.d. sampling by inverse CDF over the flat table.
pub fn draw_samples(p: &JointTable, m: u64, seed: u64) -> Result<SampleSet> {
    p.validate()?;
    let mut cdf = Vec::with_capacity(p.probs().len());
    let mut acc = 0.0f64;
    for &q in p.probs() {
        acc += q;
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(m as usize);
    for _ in 0..m {
        let u: f64 = rng.gen_range(0.0..1.0);
        let idx = match cdf.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
            Ok(i) | Err(i) => i.min(cdf.len() - 1),
        };
        rows.push(p.decode(idx));
    }
    SampleSet::new(p.vars().clone(), rows)
}

/// Draws models until the measured floor reaches `min_alpha`, bumping the
/// seed each try. Returns the decomposition, the distribution, and the
/// measured value.
pub fn generate(
    spec: &GeneratorSpec,
    min_alpha: f64,
    max_tries: usize,
) -> Result<(TreeDecomposition, JointTable, f64)> {
    for t in 0..max_tries.max(1) {
        let attempt = GeneratorSpec { seed: spec.seed.wrapping_add(t as u64), ..*spec };
        let td = random_ktree_td(&attempt)?;
        let p = random_factorizing_dist(&td, &attempt)?;
        let alpha = measure_alpha(&p, &td)?;
        if alpha >= min_alpha {
            return Ok((td, p, alpha));
        }
    }
    Err(Error::InvalidSpec(format!(
        "no model reached alpha >= {min_alpha} within {max_tries} tries"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::projection_kl;

    fn spec(n: usize, k: usize, seed: u64) -> GeneratorSpec {
        GeneratorSpec { n, k, seed, card: 2, dependence_strength: 0.3 }
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(
            random_ktree_td(&spec(2, 2, 1)),
            Err(Error::InvalidSpec(_))
        ));
        let mut s = spec(4, 1, 1);
        s.dependence_strength = 0.5;
        assert!(random_ktree_td(&s).is_err());
        s.dependence_strength = 0.3;
        s.card = 1;
        assert!(random_ktree_td(&s).is_err());
    }

    #[test]
    fn ktree_shape_and_determinism() {
        let s = spec(8, 2, 1);
        let td = random_ktree_td(&s).unwrap();
        td.validate(8).unwrap();
        assert_eq!(td.bags.len(), 6);
        assert_eq!(td.width(), 2);
        assert!(td.bags.iter().all(|b| b.len() == 3));
        assert_eq!(td, random_ktree_td(&s).unwrap());

        let single = random_ktree_td(&spec(3, 2, 9)).unwrap();
        assert_eq!(single.bags.len(), 1);
    }

    #[test]
    fn factorizing_dist_is_valid_and_positive() {
        for seed in 0..10u64 {
            let s = spec(6, 2, seed);
            let td = random_ktree_td(&s).unwrap();
            let p = random_factorizing_dist(&td, &s).unwrap();
            p.validate().unwrap();
            assert!(p.probs().iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn generated_models_factorize_exactly() {
        for seed in 0..20u64 {
            let s = spec(5 + (seed % 3) as usize, 1 + (seed % 2) as usize, 100 + seed);
            let td = random_ktree_td(&s).unwrap();
            let p = random_factorizing_dist(&td, &s).unwrap();
            let kl = projection_kl(&p, &td).unwrap();
            assert!(kl < 1e-9, "seed {seed}: kl = {kl}");
        }
    }

    /// Independent re-implementation of the alpha meter: adjacency from
    /// scratch, components by depth-first search over a different
    /// representation, bipartitions by complement-free enumeration.
    fn alpha_by_double_loop(p: &JointTable, td: &TreeDecomposition) -> f64 {
        let n = p.n();
        let mut adj = vec![vec![false; n]; n];
        for bagset in &td.bags {
            let ids = bagset.ids();
            for i in 0..ids.len() {
                for j in 0..ids.len() {
                    if i != j {
                        adj[ids[i]][ids[j]] = true;
                    }
                }
            }
        }
        let mut best = f64::INFINITY;
        for &(i, j) in &td.edges {
            let sep = td.bags[i].intersect(&td.bags[j]);
            let mut comp_of = vec![usize::MAX; n];
            let mut comps: Vec<Vec<usize>> = Vec::new();
            for v in 0..n {
                if sep.contains(v) || comp_of[v] != usize::MAX {
                    continue;
                }
                let mut stack = vec![v];
                let id = comps.len();
                comps.push(Vec::new());
                comp_of[v] = id;
                while let Some(x) = stack.pop() {
                    comps[id].push(x);
                    for y in 0..n {
                        if adj[x][y] && !sep.contains(y) && comp_of[y] == usize::MAX {
                            comp_of[y] = id;
                            stack.push(y);
                        }
                    }
                }
            }
            for comp in &comps {
                if comp.len() < 2 {
                    continue;
                }
                let mut sorted = comp.clone();
                sorted.sort_unstable();
                for mask in 1u64..(1u64 << sorted.len()) - 1 {
                    if mask & 1 == 0 {
                        continue; // fix the lowest element on side a
                    }
                    let a: Vec<usize> = (0..sorted.len())
                        .filter(|&i| mask >> i & 1 == 1)
                        .map(|i| sorted[i])
                        .collect();
                    let b: Vec<usize> = (0..sorted.len())
                        .filter(|&i| mask >> i & 1 == 0)
                        .map(|i| sorted[i])
                        .collect();
                    let cmi = p
                        .cond_mutual_info(
                            &SubsetV::from_ids(a),
                            &SubsetV::from_ids(b),
                            &sep,
                        )
                        .unwrap();
                    best = best.min(cmi);
                }
            }
        }
        best
    }

    #[test]
    fn alpha_matches_double_loop_oracle() {
        for seed in 0..12u64 {
            let s = spec(6, 1 + (seed % 2) as usize, 40 + seed);
            let td = random_ktree_td(&s).unwrap();
            let p = random_factorizing_dist(&td, &s).unwrap();
            let got = measure_alpha(&p, &td).unwrap();
            let want = alpha_by_double_loop(&p, &td);
            if want.is_infinite() {
                assert!(got.is_infinite());
            } else {
                assert!((got - want).abs() < 1e-12, "seed {seed}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn alpha_infinite_when_components_are_singletons() {
        // Two variables in separate bags: the empty separator leaves two
        // singleton components, so nothing can be split.
        let td = TreeDecomposition {
            bags: vec![SubsetV::singleton(0), SubsetV::singleton(1)],
            edges: vec![(0, 1)],
        };
        let p = JointTable::new(VarSet::uniform(2, 2).unwrap(), vec![0.25; 4]).unwrap();
        assert!(measure_alpha(&p, &td).unwrap().is_infinite());
    }

    #[test]
    fn alpha_zero_for_product_distribution() {
        let s = spec(5, 1, 3);
        let td = random_ktree_td(&s).unwrap();
        let p = JointTable::new(VarSet::uniform(5, 2).unwrap(), vec![1.0 / 32.0; 32]).unwrap();
        let alpha = measure_alpha(&p, &td).unwrap();
        assert!(alpha.abs() < 1e-12);
    }

    #[test]
    fn alpha_positive_on_most_seeds() {
        let mut positive = 0;
        for seed in 0..40u64 {
            let s = GeneratorSpec {
                n: 6,
                k: 1,
                seed,
                card: 2,
                dependence_strength: 0.1,
            };
            let td = random_ktree_td(&s).unwrap();
            let p = random_factorizing_dist(&td, &s).unwrap();
            if measure_alpha(&p, &td).unwrap() > 1e-9 {
                positive += 1;
            }
        }
        assert!(positive >= 38, "only {positive}/40 seeds had a positive floor");
    }

    #[test]
    fn generate_retries_until_floor() {
        let (td, p, alpha) = generate(&spec(6, 1, 17), 0.01, 50).unwrap();
        assert!(alpha >= 0.01);
        assert!(projection_kl(&p, &td).unwrap() < 1e-9);
    }

    #[test]
    fn sampling_is_deterministic_and_in_range() {
        let s = spec(4, 1, 5);
        let td = random_ktree_td(&s).unwrap();
        let p = random_factorizing_dist(&td, &s).unwrap();
        let a = draw_samples(&p, 500, 42).unwrap();
        let b = draw_samples(&p, 500, 42).unwrap();
        assert_eq!(a.rows(), b.rows());
        let c = draw_samples(&p, 500, 43).unwrap();
        assert_ne!(a.rows(), c.rows());
    }

    #[test]
    fn point_mass_sampling_repeats_one_row() {
        let mut probs = vec![0.0; 8];
        probs[5] = 1.0;
        let p = JointTable::new(VarSet::uniform(3, 2).unwrap(), probs).unwrap();
        let s = draw_samples(&p, 50, 1).unwrap();
        assert!(s.rows().iter().all(|r| r == &p.decode(5)));
    }

    #[test]
    fn empirical_frequencies_converge() {
        let p = JointTable::new(VarSet::uniform(1, 2).unwrap(), vec![0.5, 0.5]).unwrap();
        let s = draw_samples(&p, 100_000, 7).unwrap();
        let zeros = s.rows().iter().filter(|r| r[0] == 0).count() as f64;
        assert!((zeros / 100_000.0 - 0.5).abs() < 0.01);
    }

    #[test]
    fn total_variation_shrinks_with_samples() {
        use crate::estimation::empirical_table;
        let s = spec(3, 1, 11);
        let td = random_ktree_td(&s).unwrap();
        let p = random_factorizing_dist(&td, &s).unwrap();
        let emp = empirical_table(&draw_samples(&p, 100_000, 3).unwrap()).unwrap();
        let tv: f64 = p
            .probs()
            .iter()
            .zip(emp.probs().iter())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.02, "total variation {tv}");
    }
}
