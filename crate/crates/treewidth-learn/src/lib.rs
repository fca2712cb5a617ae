//! Learning bounded tree-width graphical models from data.
//!
//! Given either an explicit joint distribution or i.i.d. samples over
//! discrete variables, this crate searches for a tree decomposition of
//! width at most `k` whose factorization is close to the source in
//! KL divergence. The pipeline:
//!
//! 1. an entropy oracle over variable subsets ([`estimation::EntropyOracle`]),
//!    exact or plug-in from samples;
//! 2. minimization of the symmetric conditional-information cut function
//!    by Queyranne's algorithm ([`submodular::queyranne_minimize`]);
//! 3. near-independent partitions of the ground set conditioned on every
//!    candidate separator ([`partitions::build_family`]);
//! 4. a dynamic program that assembles a tree decomposition compatible
//!    with that family, if one exists ([`treedecomp::find_compatible_td`]);
//! 5. projection of the source onto the decomposition and an exact
//!    divergence accounting ([`projection::project`],
//!    [`projection::projection_kl`]).
//!
//! The top-level entry point is [`projection::learn`]. Model generators
//! for experiments live in [`modelgen`]; plain-text file formats in [`io`].
//!
//! Runnable walkthroughs, one per capability, live under `examples/`:
//!
//! - `learn_exact`: recover a decomposition from a known joint table.
//! - `learn_from_samples`: the same from finite data, with the tolerance
//!   schedule printed.
//! - `minimum_information_cut`: Queyranne's algorithm on an information
//!   cut, cross-checked against brute force.
//! - `epsilon_partitions`: how a ground set shatters as the tolerance
//!   grows.
//! - `project_onto_tree`: projection and the per-edge divergence ledger.
//! - `generate_and_measure`: sample a random model and measure how
//!   strongly connected it is.

pub mod discrete;
pub mod error;
pub mod estimation;
pub mod io;
pub mod modelgen;
pub mod partitions;
pub mod projection;
pub mod submodular;
pub mod treedecomp;

pub use discrete::{JointTable, SubsetV, VarSet};
pub use error::{Error, Result};
pub use estimation::{EntropyOracle, EstimatorBudget, SampleSet};
pub use modelgen::GeneratorSpec;
pub use partitions::{Partition, PartitionFamily};
pub use projection::{learn, projection_kl, FactorizedModel, LearnConfig, LearnSource, Learned};
pub use submodular::{queyranne_minimize, MinCutResult, SetFunctionOracle};
pub use treedecomp::{find_compatible_td, TreeDecomposition};
