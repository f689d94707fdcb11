//! Symbolic and numeric engine for first-order homogeneous variational
//! problems on velocity manifolds.

// Tensor code indexes several arrays by the same jet index; `!(x < tol)`
// is used so NaN counts as a failure.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod forms;
pub mod jetcalc;
pub mod jetgroup;
pub mod numeric;
pub mod prolong;
pub mod random;
pub mod suites;
pub mod symexpr;
pub mod variational;

pub use error::{Error, Result};
