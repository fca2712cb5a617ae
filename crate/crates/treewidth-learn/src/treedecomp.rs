//! Tree decompositions over variable ids, their validation, and the search
//! for a decomposition of bounded width whose edge separators agree with a
//! partition family.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::discrete::SubsetV;
use crate::error::{Error, Result};
use crate::partitions::{Partition, PartitionFamily};

/// A tree decomposition: bags of variable ids plus tree edges between bag
/// indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<SubsetV>,
    pub edges: Vec<(usize, usize)>,
}

/// One tree edge with its separator and the two variable sets it splits
/// the rest of the ground set into. `side_a` holds the variables on the
/// side of `edge.0`, minus the separator.
#[derive(Debug, Clone)]
pub struct EdgeSeparator {
    pub edge: (usize, usize),
    pub sep: SubsetV,
    pub side_a: SubsetV,
    pub side_b: SubsetV,
}

impl TreeDecomposition {
    /// Largest bag size minus one.
    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(0).saturating_sub(1)
    }

    /// Checks the three tree-decomposition invariants over ground set
    /// `0..n`: the edges form a tree on the bags, every variable appears
    /// in some bag, and the bags containing any fixed variable form a
    /// connected subtree.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.bags.is_empty() {
            return Err(Error::NotATree);
        }
        for b in &self.bags {
            if let Some(&id) = b.ids().iter().find(|&&id| id >= n) {
                return Err(Error::InvalidSubset { id, n });
            }
        }
        let m = self.bags.len();
        if self.edges.len() + 1 != m {
            return Err(Error::NotATree);
        }
        let mut adj = vec![Vec::new(); m];
        for &(i, j) in &self.edges {
            if i >= m || j >= m || i == j {
                return Err(Error::NotATree);
            }
            adj[i].push(j);
            adj[j].push(i);
        }
        // Edge count plus connectivity rules out cycles.
        let mut seen = vec![false; m];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for &j in &adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::NotATree);
        }
        for v in 0..n {
            let holders: Vec<usize> =
                (0..m).filter(|&i| self.bags[i].contains(v)).collect();
            let Some(&start) = holders.first() else {
                return Err(Error::CoverageGap(v));
            };
            // Walk only through bags containing v; all holders must be
            // reachable.
            let mut reach = BTreeSet::from([start]);
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                for &j in &adj[i] {
                    if self.bags[j].contains(v) && reach.insert(j) {
                        queue.push_back(j);
                    }
                }
            }
            if holders.iter().any(|h| !reach.contains(h)) {
                return Err(Error::RunningIntersectionViolation(v));
            }
        }
        Ok(())
    }

    /// Separator and side sets for every edge. Assumes a validated
    /// decomposition over ground set `0..n`.
    pub fn edge_separators(&self, n: usize) -> Result<Vec<EdgeSeparator>> {
        let m = self.bags.len();
        let mut adj = vec![Vec::new(); m];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        let mut out = Vec::with_capacity(self.edges.len());
        for &(i, j) in &self.edges {
            let sep = self.bags[i].intersect(&self.bags[j]);
            // Bags reachable from i without crossing the (i, j) edge.
            let mut on_a = vec![false; m];
            on_a[i] = true;
            let mut queue = VecDeque::from([i]);
            while let Some(x) = queue.pop_front() {
                for &y in &adj[x] {
                    if (x, y) == (i, j) || (y, x) == (i, j) || on_a[y] {
                        continue;
                    }
                    on_a[y] = true;
                    queue.push_back(y);
                }
            }
            let mut a_ids = BTreeSet::new();
            let mut b_ids = BTreeSet::new();
            for (idx, bag) in self.bags.iter().enumerate() {
                let acc = if on_a[idx] { &mut a_ids } else { &mut b_ids };
                acc.extend(bag.iter());
            }
            let side = |ids: BTreeSet<usize>| {
                SubsetV::from_ids(ids.into_iter().filter(|&v| !sep.contains(v)).collect())
            };
            let (side_a, side_b) = (side(a_ids), side(b_ids));
            if !side_a.is_disjoint_from(&side_b) {
                return Err(Error::RunningIntersectionViolation(
                    side_a.intersect(&side_b).ids()[0],
                ));
            }
            let _ = n;
            out.push(EdgeSeparator { edge: (i, j), sep, side_a, side_b });
        }
        Ok(out)
    }

    /// The graph whose edges connect every pair of variables sharing a
    /// bag. For a valid decomposition this graph is chordal.
    pub fn to_chordal(&self, n: usize) -> ChordalGraph {
        let mut g = ChordalGraph::new(n);
        for bag in &self.bags {
            let ids = bag.ids();
            for i in 0..ids.len() {
                for j in (i + 1)..ids.len() {
                    g.add_edge(ids[i], ids[j]);
                }
            }
        }
        g
    }
}

/// Simple undirected graph with a chordality test and component queries.
#[derive(Debug, Clone)]
pub struct ChordalGraph {
    n: usize,
    adj: Vec<BTreeSet<usize>>,
}

impl ChordalGraph {
    pub fn new(n: usize) -> Self {
        ChordalGraph { n, adj: vec![BTreeSet::new(); n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[u].iter().copied()
    }

    /// Maximum-cardinality search; the reverse visit order is a perfect
    /// elimination ordering exactly when the graph is chordal.
    pub fn is_chordal(&self) -> bool {
        let n = self.n;
        let mut weight = vec![0usize; n];
        let mut visited = vec![false; n];
        let mut order = Vec::with_capacity(n);
        for _ in 0..n {
            let v = (0..n)
                .filter(|&v| !visited[v])
                .max_by_key(|&v| (weight[v], std::cmp::Reverse(v)))
                .expect("unvisited vertex remains");
            visited[v] = true;
            order.push(v);
            for &u in &self.adj[v] {
                if !visited[u] {
                    weight[u] += 1;
                }
            }
        }
        let mut pos = vec![0usize; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        // In the reversed order, each vertex's later neighbors must form a
        // clique; equivalently the earlier-visited neighbors here.
        for &v in order.iter() {
            let earlier: Vec<usize> =
                self.adj[v].iter().copied().filter(|&u| pos[u] < pos[v]).collect();
            // It suffices to check the most recently visited one against
            // the rest, but the graphs here are tiny.
            for i in 0..earlier.len() {
                for j in (i + 1)..earlier.len() {
                    if !self.has_edge(earlier[i], earlier[j]) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Connected components of the graph restricted to vertices outside
    /// `s`, sorted by smallest member.
    pub fn components_without(&self, s: &SubsetV) -> Vec<SubsetV> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] || s.contains(start) {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &u in &self.adj[v] {
                    if !seen[u] && !s.contains(u) {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
            out.push(SubsetV::from_ids(comp));
        }
        out
    }
}

/// Checks whether every edge separator of `td` carries a partition in the
/// family that refines the edge's bipartition. Edges with an empty side
/// are trivially compatible. Separators larger than the family's bound
/// are an error rather than a mere mismatch.
pub fn compatible(td: &TreeDecomposition, fam: &PartitionFamily) -> Result<bool> {
    let n = fam.n();
    td.validate(n)?;
    for es in td.edge_separators(n)? {
        if es.side_a.is_empty() || es.side_b.is_empty() {
            continue;
        }
        if es.sep.len() > fam.k() {
            return Err(Error::SeparatorTooLarge(es.sep.ids().to_vec(), fam.k()));
        }
        let Some(entry) = fam.get(&es.sep) else {
            return Err(Error::Internal(format!(
                "separator {} missing from family",
                es.sep
            )));
        };
        let ground = SubsetV::full(n).minus(&es.sep);
        let coarse = Partition::new(ground, vec![es.side_a.clone(), es.side_b.clone()])?;
        if !entry.partition.refines(&coarse)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// How a dynamic-programming state was realized; enough to rebuild the
/// subtree of bags below it.
#[derive(Debug, Clone)]
enum Derivation {
    /// One bag holding the whole state.
    Leaf,
    /// Root bag `S ∪ {v}` with one child subtree per listed state.
    Extend { v: usize, children: Vec<StateKey> },
}

/// A state `(S, A)`: block `A` of the family partition at separator `S`,
/// to be covered by a subtree whose root bag contains `S`.
type StateKey = (SubsetV, SubsetV);

/// Finds a tree decomposition of width at most the family's bound whose
/// every edge separator is compatible with the family, or reports that
/// none is reachable.
pub fn find_compatible_td(fam: &PartitionFamily) -> Result<TreeDecomposition> {
    let n = fam.n();
    let k = fam.k();
    if n <= k + 1 {
        let td = TreeDecomposition { bags: vec![SubsetV::full(n)], edges: vec![] };
        td.validate(n)?;
        return Ok(td);
    }
    // States grouped by |S ∪ A|: every derivation step moves to states of
    // the same size or smaller, so layers are closed from below and each
    // layer is swept to a fixed point.
    let mut layers: BTreeMap<usize, Vec<StateKey>> = BTreeMap::new();
    for entry in fam.entries() {
        for block in entry.partition.blocks() {
            layers
                .entry(entry.separator.len() + block.len())
                .or_default()
                .push((entry.separator.clone(), block.clone()));
        }
    }
    let mut realized: BTreeMap<StateKey, Derivation> = BTreeMap::new();
    for states in layers.values() {
        loop {
            let mut changed = false;
            for key in states {
                if realized.contains_key(key) {
                    continue;
                }
                if let Some(d) = derive(fam, key, &realized) {
                    realized.insert(key.clone(), d);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }
    for entry in fam.entries() {
        let all = entry
            .partition
            .blocks()
            .iter()
            .all(|a| realized.contains_key(&(entry.separator.clone(), a.clone())));
        if !all {
            continue;
        }
        let mut bags = Vec::new();
        let mut edges = Vec::new();
        let mut roots = Vec::new();
        for a in entry.partition.blocks() {
            let key = (entry.separator.clone(), a.clone());
            roots.push(build(&key, &realized, &mut bags, &mut edges));
        }
        for pair in roots.windows(2) {
            edges.push((pair[0], pair[1]));
        }
        let td = TreeDecomposition { bags, edges };
        td.validate(n)
            .map_err(|e| Error::Internal(format!("search produced invalid tree: {e}")))?;
        if td.width() > k {
            return Err(Error::Internal("search exceeded width bound".into()));
        }
        if !compatible(&td, fam)? {
            return Err(Error::Internal("search produced incompatible tree".into()));
        }
        return Ok(td);
    }
    Err(Error::NoDecomposition)
}

/// Tries to realize `(S, A)` given the states realized so far. Either the
/// state fits in one bag, or some vertex `v` joins the separator: the rest
/// of `A` must then be covered exactly by disjoint realized blocks taken
/// from partitions at separators inside `S ∪ {v}`.
fn derive(
    fam: &PartitionFamily,
    (s, a): &StateKey,
    realized: &BTreeMap<StateKey, Derivation>,
) -> Option<Derivation> {
    let k = fam.k();
    if s.len() + a.len() <= k + 1 {
        return Some(Derivation::Leaf);
    }
    for v in s.union(a).iter() {
        let sep1 = s.insert(v);
        let target = a.minus(&SubsetV::singleton(v));
        if target.is_empty() {
            continue;
        }
        // All realized blocks usable as child subtrees, one candidate
        // separator per block: prefer the smallest, then lexicographically
        // least.
        let mut by_block: BTreeMap<SubsetV, SubsetV> = BTreeMap::new();
        let sep_ids = sep1.ids();
        for mask in 0u32..(1 << sep_ids.len()) {
            let l = SubsetV::from_ids(
                (0..sep_ids.len())
                    .filter(|&i| mask >> i & 1 == 1)
                    .map(|i| sep_ids[i])
                    .collect(),
            );
            if l.len() > k {
                continue;
            }
            let Some(entry) = fam.get(&l) else { continue };
            for b in entry.partition.blocks() {
                if !b.is_subset_of(&target)
                    || !realized.contains_key(&(l.clone(), b.clone()))
                {
                    continue;
                }
                by_block
                    .entry(b.clone())
                    .and_modify(|best| {
                        if (l.len(), l.ids()) < (best.len(), best.ids()) {
                            *best = l.clone();
                        }
                    })
                    .or_insert_with(|| l.clone());
            }
        }
        let mut cands: Vec<&SubsetV> = by_block.keys().collect();
        cands.sort_by_key(|b| (std::cmp::Reverse(b.len()), b.ids().to_vec()));
        let mut chosen = Vec::new();
        if exact_cover(&target, &cands, &mut chosen) {
            let children = chosen
                .into_iter()
                .map(|b| (by_block[b].clone(), b.clone()))
                .collect();
            return Some(Derivation::Extend { v, children });
        }
    }
    None
}

/// Backtracking exact cover: always branch on the lowest uncovered id.
fn exact_cover<'a>(
    remaining: &SubsetV,
    cands: &[&'a SubsetV],
    chosen: &mut Vec<&'a SubsetV>,
) -> bool {
    if remaining.is_empty() {
        return true;
    }
    let lowest = remaining.ids()[0];
    for &c in cands {
        if !c.contains(lowest) || !c.is_subset_of(remaining) {
            continue;
        }
        chosen.push(c);
        if exact_cover(&remaining.minus(c), cands, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Materializes the bag tree below a realized state; returns the root bag
/// index.
fn build(
    key: &StateKey,
    realized: &BTreeMap<StateKey, Derivation>,
    bags: &mut Vec<SubsetV>,
    edges: &mut Vec<(usize, usize)>,
) -> usize {
    match &realized[key] {
        Derivation::Leaf => {
            bags.push(key.0.union(&key.1));
            bags.len() - 1
        }
        Derivation::Extend { v, children } => {
            bags.push(key.0.insert(*v));
            let root = bags.len() - 1;
            for child in children {
                let c = build(child, realized, bags, edges);
                edges.push((root, c));
            }
            root
        }
    }
}
