//! Sparse approximate maps for recycling preconditioners across sequences
//! of slowly changing sparse linear systems.
//!
//! A preconditioner `P₀` built once for `A₀` is reused for `A_k` as
//! `N_k·P₀`, where the sparse map `N_k` minimizes `‖A_k·N_k − A₀‖_F` over a
//! prescribed sparsity pattern. The crate provides the sparse kernels,
//! pattern generators, the map computation, an ILUTP factorization, a
//! right-preconditioned restarted GMRES, problem generators, and a harness
//! that runs update strategies over a sequence.

// `!(x > 0.0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod ilutp;
pub mod krylov;
pub mod operator;
pub mod pattern;
pub mod problems;
pub mod sam;
pub mod scalar;
pub mod sparse;

pub use error::{Error, Result};
pub use ilutp::{IlutpFactors, IlutpParams};
pub use krylov::{gmres, GmresConfig, SolveReport};
pub use operator::{Identity, LinearOperator};
pub use pattern::SparsityPattern;
pub use sam::{compose, compute_map, PreconditionerChain, SamMap, SamPlan};
pub use scalar::Scalar;
pub use sparse::SparseMatrix;
