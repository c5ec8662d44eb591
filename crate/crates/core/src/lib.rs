//! Orthogonal AMP and AMP for compressed sensing: measurement ensembles,
//! denoisers, linear estimators, solvers and state evolution.

// `!(x >= 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod denoisers;
pub mod ensembles;
pub mod error;
pub mod exec;
pub mod linest;
pub mod model;
pub mod quadrature;
pub mod rng;
pub mod sevo;
pub mod solvers;
pub mod transforms;

pub use error::{OampError, Result};
