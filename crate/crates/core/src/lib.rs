//! Hamming-weight preserving QAOA simulation for constrained graph problems.

pub mod cli;
pub mod error;
pub mod graph;
pub mod harness;
pub mod operators;
pub mod oracle;
pub mod qaoa;
pub mod rng;
pub mod subspace;
pub mod tuner;
pub mod validate;

pub use error::{Error, Result};
