//! Watch a ground set shatter as the split tolerance grows.
//!
//! An epsilon-partition repeatedly splits any block that can be cut for
//! less than eps bits of conditional information. At eps near zero only
//! genuinely independent groups separate; as eps rises past the model's
//! internal dependencies, the partition collapses to singletons.

use treewidth_learn::modelgen::{random_factorizing_dist, random_ktree_td, GeneratorSpec};
use treewidth_learn::partitions::epsilon_partition;
use treewidth_learn::{EntropyOracle, Result, SubsetV};

fn main() -> Result<()> {
    let spec = GeneratorSpec {
        n: 7,
        k: 1,
        seed: 19,
        card: 2,
        dependence_strength: 0.25,
    };
    let td = random_ktree_td(&spec)?;
    let p = random_factorizing_dist(&td, &spec)?;
    let h = EntropyOracle::exact(p);

    // Condition on variable 0 and partition the rest.
    let s = SubsetV::singleton(0);
    let v = SubsetV::full(spec.n);
    println!("partitioning {} conditioned on {s}:", v.minus(&s));
    for eps in [1e-12, 1e-4, 1e-3, 1e-2, 0.1, 1.0] {
        let pi = epsilon_partition(&h, &v, &s, eps)?;
        println!("  eps = {eps:>8.0e}  ->  {} block(s): {pi}", pi.len());
    }

    // The same ground set conditioned on nothing usually holds together
    // longer: the separator was doing real work.
    let empty = SubsetV::empty();
    let full = SubsetV::full(spec.n);
    println!("partitioning {full} with no separator:");
    for eps in [1e-3, 1e-2, 0.1] {
        let pi = epsilon_partition(&h, &full, &empty, eps)?;
        println!("  eps = {eps:>8.0e}  ->  {} block(s): {pi}", pi.len());
    }
    Ok(())
}
