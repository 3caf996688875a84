//! Computational filter and ideal theory on ℕ = {1, 2, 3, …}.
//!
//! The crate has five layers:
//!
//! * [`setexpr`] — lazy structured subsets of ℕ with a small text DSL and
//!   exact prefix-level set algebra.
//! * [`weights`] and [`density`] — divergent weight sequences, weighted
//!   prefix densities, and membership classifiers for the Fréchet,
//!   summable, and Erdős–Ulam ideals and their grills.
//! * [`witness`] — greedy block partitions witnessing that summable and
//!   Erdős–Ulam filters are conglomerated, plus almost-disjoint families
//!   built from binary trees.
//! * [`convergence`] — filter limits of real sequences (statistical
//!   convergence and its weighted generalizations) and a seeded
//!   Monte-Carlo law-of-large-numbers experiment.
//! * [`ultralab`] — exact brute-force verification of ultrafilter
//!   intersection lattice theorems on small finite universes, where every
//!   statement is decidable.
//!
//! Everything is deterministic: set membership is exact and structural,
//! randomized experiments are seeded, and reports serialize to JSON.
//! Start with the `examples/` directory; each example is a runnable tour
//! of one capability.

pub mod cli;
pub mod convergence;
pub mod density;
pub mod num;
pub mod rng;
pub mod setexpr;
pub mod ultralab;
pub mod weights;
pub mod witness;

pub use density::{DensityEstimate, IdealSpec, Side, Verdict};
pub use setexpr::{parse_set_expr, PrefixView, SetExpr};
pub use weights::WeightSeq;
pub use witness::{BitPattern, BlockPartition, WitnessKind, WitnessReport};
