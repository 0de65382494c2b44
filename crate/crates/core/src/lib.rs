//! Classical optimisation under a query-counting oracle, with query-level
//! emulators and cost models for quantum-accelerated variants.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod bnb;
pub mod corpus;
pub mod direct;
pub mod error;
pub mod line_search;
pub mod minibatch;
pub mod nelder_mead;
pub mod objective;
pub mod quantum;

pub use error::{Error, Result};
pub use objective::{AveragedObjective, CountingOracle, Domain, ObjectiveFunction, ProbeMode};
