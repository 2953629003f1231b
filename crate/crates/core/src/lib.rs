//! Exact, desk-scale machinery for circuit-sampled distributions and the
//! promise problems of non-interactive statistical zero-knowledge with help.
//!
//! Every distribution is a [`Circuit`] over uniform input bits, so every
//! probability is an exact dyadic rational and the lemmas about statistical
//! difference, disjointness, polarization and the reductions between
//! complete problems can be checked as equalities by enumeration.

pub mod budget;
pub mod circuit;
pub mod cli;
pub mod dist;
pub mod error;
pub mod generate;
pub mod ops;
pub mod polarize;
pub mod prob;
pub mod protocol;
pub mod quantum;
pub mod reductions;
pub mod report;

pub use budget::Budget;
pub use circuit::{Circuit, CircuitBuilder, GateOp, WireRef};
pub use dist::{enumerate, ExactDistribution, ProbabilisticCircuit};
pub use error::{Error, Result};
pub use prob::{ExactValue, Prob};
