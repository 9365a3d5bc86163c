//! Monte Carlo and convex-optimization laboratory for weak and strong tail
//! domination of random vectors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod counterexample;
pub mod domination;
pub mod error;
pub mod regularity;
pub mod special;
pub mod stats;
pub mod stochastic;
pub mod theorems;

pub use error::{Error, Result};
