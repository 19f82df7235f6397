//! Douglas-Rachford splitting for objectives `f + g` where `f` is strongly
//! convex and `g` is a weakly convex sparsity penalty, with the bounds and
//! experiment harness used to study the iterations.

// `!(x > 0.0)` guards are deliberate: they reject NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod penalty;
pub mod smooth;
pub mod solver;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, DenseVector, LinearMap};
pub use penalty::{FirmPenalty, Penalty};
pub use smooth::{DataTerm, QuadraticTerm, SubspaceQuadraticTerm};
pub use solver::{IterationTrace, Problem, SolverConfig, Variant};
