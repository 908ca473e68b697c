//! Weighted Sobolev spaces with degenerate weights.
//!
//! Weight functions and their hypotheses, the cutoff family `χ_n`, weighted
//! norms and identity verifiers, inequality checks, and a P1 Galerkin solver
//! for degenerate elliptic problems whose solutions can fail to be locally
//! integrable.

// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod cutoff;
pub mod error;
pub mod experiments;
pub mod fem;
pub mod geometry;
pub mod jet;
pub mod multi_index;
pub mod sum;
pub mod weights;

pub use error::{Error, Result};
pub use multi_index::MultiIndex;
