//! Exhaustive cross-validation of the compatible-tree search.
//!
//! The search is a dynamic program whose completeness is the crate's most
//! delicate claim, so this suite re-decides existence from first
//! principles: every width-bounded tree decomposition over a small ground
//! set arises (after contracting redundant edges) as a tree over the
//! maximal cliques of a chordal graph, so enumerating all graphs, keeping
//! the chordal ones with small enough cliques, and trying every labeled
//! tree over their maximal cliques visits every candidate. Compatibility
//! with a partition family is then re-checked with independent code, and
//! the verdicts must agree with the library's.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treewidth_learn::modelgen::{random_factorizing_dist, random_ktree_td, GeneratorSpec};
use treewidth_learn::partitions::build_family;
use treewidth_learn::treedecomp::find_compatible_td;
use treewidth_learn::{
    EntropyOracle, Error, JointTable, PartitionFamily, SubsetV, TreeDecomposition, VarSet,
};

fn random_table(n: usize, seed: u64) -> JointTable {
    let vars = VarSet::uniform(n, 2).unwrap();
    let cells = vars.cell_count().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probs: Vec<f64> = (0..cells).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    JointTable::new(vars, probs).unwrap()
}

/// Simplicial-elimination chordality test on an adjacency matrix.
fn is_chordal(n: usize, adj: &[Vec<bool>]) -> bool {
    let mut alive: Vec<usize> = (0..n).collect();
    let mut adj = adj.to_vec();
    while let Some(pos) = alive.iter().position(|&v| {
        let nb: Vec<usize> = alive
            .iter()
            .copied()
            .filter(|&u| u != v && adj[v][u])
            .collect();
        nb.iter()
            .all(|&a| nb.iter().all(|&b| a == b || adj[a][b]))
    }) {
        let v = alive.remove(pos);
        adj[v].fill(false);
        for row in adj.iter_mut() {
            row[v] = false;
        }
    }
    alive.is_empty()
}

fn max_clique_at_most(n: usize, adj: &[Vec<bool>], cap: usize) -> bool {
    // Any clique above the cap contains one of size cap + 1.
    let target = cap + 1;
    for mask in 0u64..(1 << n) {
        if (mask.count_ones() as usize) != target {
            continue;
        }
        let vs: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        if vs.iter().all(|&a| vs.iter().all(|&b| a == b || adj[a][b])) {
            return false;
        }
    }
    true
}

fn maximal_cliques(n: usize, adj: &[Vec<bool>]) -> Vec<SubsetV> {
    let mut cliques: Vec<u64> = Vec::new();
    for mask in 1u64..(1 << n) {
        let vs: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        if vs.iter().all(|&a| vs.iter().all(|&b| a == b || adj[a][b])) {
            cliques.push(mask);
        }
    }
    let maximal: Vec<u64> = cliques
        .iter()
        .copied()
        .filter(|&c| !cliques.iter().any(|&d| d != c && d & c == c))
        .collect();
    maximal
        .into_iter()
        .map(|m| SubsetV::from_ids((0..n).filter(|&v| m >> v & 1 == 1).collect()))
        .collect()
}

fn prufer_decode(seq: &[usize], c: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; c];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(c - 1);
    let mut seq = seq.to_vec();
    for i in 0..seq.len() {
        let leaf = (0..c).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf, seq[i]));
        degree[leaf] -= 1;
        degree[seq[i]] -= 1;
        // Mark consumed so the leaf scan cannot pick it again.
        seq[i] = usize::MAX;
        let _ = &seq;
    }
    let rest: Vec<usize> = (0..c).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Running intersection, checked directly: for every vertex, the tree
/// nodes holding it must be connected.
fn rip_holds(n: usize, bags: &[SubsetV], edges: &[(usize, usize)]) -> bool {
    let c = bags.len();
    let mut adj = vec![Vec::new(); c];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    for v in 0..n {
        let holders: Vec<usize> = (0..c).filter(|&i| bags[i].contains(v)).collect();
        if holders.is_empty() {
            return false;
        }
        let mut seen = vec![false; c];
        seen[holders[0]] = true;
        let mut stack = vec![holders[0]];
        let mut reached = 1;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] && bags[y].contains(v) {
                    seen[y] = true;
                    reached += 1;
                    stack.push(y);
                }
            }
        }
        if reached != holders.len() {
            return false;
        }
    }
    true
}

/// Every width-k candidate decomposition over ground set 0..n, from first
/// principles.
fn candidate_tds(n: usize, k: usize) -> Vec<TreeDecomposition> {
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for gmask in 0u64..(1 << pairs.len()) {
        let mut adj = vec![vec![false; n]; n];
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if gmask >> b & 1 == 1 {
                adj[i][j] = true;
                adj[j][i] = true;
            }
        }
        if !max_clique_at_most(n, &adj, k + 1) || !is_chordal(n, &adj) {
            continue;
        }
        let bags = maximal_cliques(n, &adj);
        let c = bags.len();
        if c == 1 {
            out.push(TreeDecomposition { bags, edges: vec![] });
            continue;
        }
        if c == 2 {
            out.push(TreeDecomposition { bags, edges: vec![(0, 1)] });
            continue;
        }
        let mut seq = vec![0usize; c - 2];
        loop {
            let edges = prufer_decode(&seq, c);
            if rip_holds(n, &bags, &edges) {
                out.push(TreeDecomposition { bags: bags.clone(), edges });
            }
            let mut pos = 0;
            loop {
                if pos == seq.len() {
                    break;
                }
                seq[pos] += 1;
                if seq[pos] < c {
                    break;
                }
                seq[pos] = 0;
                pos += 1;
            }
            if pos == seq.len() {
                break;
            }
        }
    }
    out
}

/// Independent compatibility check: every edge separator's stored
/// partition must fit block-by-block into the two sides.
fn compatible_by_definition(td: &TreeDecomposition, fam: &PartitionFamily, n: usize) -> bool {
    let c = td.bags.len();
    let mut adj = vec![Vec::new(); c];
    for &(a, b) in &td.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    for &(a, b) in &td.edges {
        let sep = td.bags[a].intersect(&td.bags[b]);
        let mut side = vec![0u8; c];
        let mut stack = vec![a];
        side[a] = 1;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if side[y] == 0 && !(x == a && y == b) && !(x == b && y == a) {
                    side[y] = 1;
                    stack.push(y);
                }
            }
        }
        let mut side_a = SubsetV::empty();
        let mut side_b = SubsetV::empty();
        for (bag, &sd) in td.bags.iter().zip(&side) {
            if sd == 1 {
                side_a = side_a.union(bag);
            } else {
                side_b = side_b.union(bag);
            }
        }
        let side_a = side_a.minus(&sep);
        let side_b = side_b.minus(&sep);
        if side_a.is_empty() || side_b.is_empty() {
            continue;
        }
        let Some(entry) = fam.get(&sep) else {
            return false;
        };
        let fits = entry
            .partition
            .blocks()
            .iter()
            .all(|blk| blk.is_subset_of(&side_a) || blk.is_subset_of(&side_b));
        if !fits {
            return false;
        }
    }
    let _ = n;
    true
}

/// The library's verdict must match the exhaustive one, and any returned
/// tree must itself verify.
fn agree(fam: &PartitionFamily, candidates: &[TreeDecomposition], n: usize, k: usize) {
    let exhaustive = candidates.iter().any(|td| compatible_by_definition(td, fam, n));
    match find_compatible_td(fam) {
        Ok(td) => {
            assert!(td.validate(n).is_ok());
            assert!(td.width() <= k);
            assert!(
                compatible_by_definition(&td, fam, n),
                "returned tree fails the definition for n = {n}, k = {k}"
            );
            assert!(
                exhaustive,
                "library found a tree but exhaustive search says none exists (n = {n}, k = {k})"
            );
        }
        Err(Error::NoDecomposition) => {
            assert!(
                !exhaustive,
                "exhaustive search found a compatible tree the library missed (n = {n}, k = {k})"
            );
        }
        Err(e) => panic!("unexpected error: {e}"),
    }
}

#[test]
fn exhaustive_agreement_on_factorizing_models() {
    for &(n, k_true) in &[(4usize, 1usize), (4, 2), (5, 1), (5, 2), (6, 1), (6, 2)] {
        for seed in 0..3u64 {
            let spec = GeneratorSpec {
                n,
                k: k_true,
                seed: 10 * n as u64 + seed,
                card: 2,
                dependence_strength: 0.3,
            };
            let td = random_ktree_td(&spec).unwrap();
            let p = random_factorizing_dist(&td, &spec).unwrap();
            let h = EntropyOracle::exact(p);
            for k_search in 1..=2usize {
                let candidates = candidate_tds(n, k_search);
                for eps2 in [1e-9, 1e-2] {
                    let fam = build_family(&h, k_search, 0.0, eps2).unwrap();
                    agree(&fam, &candidates, n, k_search);
                }
            }
        }
    }
}

#[test]
fn exhaustive_agreement_on_unstructured_tables() {
    for &n in &[4usize, 5] {
        for seed in 0..4u64 {
            let p = random_table(n, 40 + seed);
            let h = EntropyOracle::exact(p);
            for k_search in 1..=2usize {
                let candidates = candidate_tds(n, k_search);
                for eps2 in [1e-6, 1e-2] {
                    let fam = build_family(&h, k_search, 0.0, eps2).unwrap();
                    agree(&fam, &candidates, n, k_search);
                }
            }
        }
    }
}

#[test]
fn exhaustive_agreement_on_width_two_truth_at_width_one() {
    // The negative-control regime: a strongly coupled width-2 model
    // searched at width 1. Both deciders must reject it.
    let candidates = candidate_tds(6, 1);
    for seed in 0..3u64 {
        let spec = GeneratorSpec {
            n: 6,
            k: 2,
            seed: 90 + seed,
            card: 2,
            dependence_strength: 0.35,
        };
        let td = random_ktree_td(&spec).unwrap();
        let p = random_factorizing_dist(&td, &spec).unwrap();
        let h = EntropyOracle::exact(p);
        let fam = build_family(&h, 1, 0.0, 1e-9).unwrap();
        agree(&fam, &candidates, 6, 1);
    }
}

#[test]
fn singleton_families_always_admit_a_tree() {
    for &(n, k) in &[(4usize, 1usize), (5, 1), (5, 2), (6, 1), (6, 2)] {
        let p = random_table(n, 600 + n as u64 + k as u64);
        let h = EntropyOracle::exact(p);
        let fam = build_family(&h, k, 0.0, 1e-6).unwrap().to_singletons();
        let candidates = candidate_tds(n, k);
        let td = find_compatible_td(&fam).expect("all-singleton families are always satisfiable");
        assert!(td.validate(n).is_ok() && td.width() <= k);
        assert!(compatible_by_definition(&td, &fam, n));
        assert!(candidates.iter().any(|c| compatible_by_definition(c, &fam, n)));
    }
}
