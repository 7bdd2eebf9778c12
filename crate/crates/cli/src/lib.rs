//! Batch interface to the hybrid ground-state solver.

// `!(x > 0)` is how NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
