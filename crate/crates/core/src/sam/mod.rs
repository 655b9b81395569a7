//! Sparse approximate maps.
//!
//! Given a reference matrix `A_ref` with a good preconditioner `P_ref` and a
//! nearby matrix `A_k`, a sparse approximate map `N` minimizes
//! `‖A_k·N − A_ref‖_F` over matrices supported on a fixed pattern. The
//! recycled preconditioner for `A_k` is then `N·P_ref`.
//!
//! The minimization splits into one small dense least-squares problem per
//! column. [`SamPlan`] records the index sets once per nonzero structure;
//! [`compute_map`] solves the columns (in parallel) and [`compose`] wires
//! the result in front of an existing preconditioner.

mod chain;
mod map;
mod plan;

pub use chain::{compose, PreconditionerChain, Stage};
pub use map::{compute_map, compute_map_with, map_residual_norm, SamMap, Workers};
pub use plan::SamPlan;
