//! Homogeneous kernels on measure spaces with dilations.

// `!(x > 0.0)` style checks reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod gl2;
pub mod hadamard_bergman;
pub mod hardy_littlewood;
pub mod kernels;
pub mod operators;
pub mod quad;
pub mod sampling;

pub use error::{Error, Result};
