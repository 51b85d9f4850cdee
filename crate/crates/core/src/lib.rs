#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod billiard;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod laws;
pub mod process;
pub mod rng;
pub mod stats;
pub mod targets;

pub use error::{Error, Result};

#[cfg(test)]
#[path = "../tests/common/mod.rs"]
mod tests_common;
