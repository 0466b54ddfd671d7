//! Parallel sets `A ⊕ rK` of finite point sets: exact planar unions, Monte
//! Carlo measures, closed-form reverse isoperimetric bounds, empirical
//! robust-risk estimation and Gaussian-mixture entropy checks.

// NaN must fail validation, so `!(x > 0.0)` is the intended form
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod entropy;
pub mod error;
pub mod exact2d;
pub mod exec;
pub mod harness;
pub mod geometry;
pub mod io;
pub mod mc;
pub mod oracle;
pub mod robust;

pub use error::{Error, Result};
pub use geometry::{NormKind, ParallelSetSpec, PointSet};
