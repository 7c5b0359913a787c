//! Self-representation based exemplar selection for data in a union of subspaces.
//!
//! The pipeline: pick exemplars by farthest-first search over the ℓ1
//! self-representation cost ([`ffs`]), represent every point over the
//! exemplars ([`lasso`]), then either cluster the codes ([`cluster`]) or,
//! given exemplar labels, classify by per-class residual ([`classify`]).
//! [`geometry`] holds exact brute-force oracles for the theory.

pub mod classify;
pub mod cli;
pub mod cluster;
pub mod dataset;
pub mod error;
pub mod ffs;
pub mod geometry;
pub mod lasso;
pub mod metrics;
pub mod rng;
pub mod selfrep;

pub use dataset::DataMatrix;
pub use error::{Error, Result};
pub use lasso::{Dictionary, LassoProblem, SolverOptions, SparseCode};
