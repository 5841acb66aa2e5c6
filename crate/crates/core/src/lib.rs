//! Process-constrained batch Bayesian optimization.
//!
//! Batch strategies where some input coordinates must be shared by every
//! point of a batch (one reactant flow for all reactors, one temperature per
//! block), including the Thompson-sampling variants pc-BO-TS and the
//! hierarchical hpc-BO-TS, with the usual baselines, benchmark objectives,
//! regret metrics, an ask-tell campaign API and a suite runner.

pub mod acquisition;
pub mod bench;
pub mod campaign;
pub mod error;
pub mod gp;
pub mod inner_opt;
pub mod metrics;
pub mod objectives;
pub mod strategies;
pub(crate) mod linalg;
pub mod rng;

pub use error::{Error, Result};
