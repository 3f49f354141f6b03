//! Fast quantum-state-transfer protocols on power-law-interacting lattices.
//!
//! The crate schedules the incremental cascaded-CNOT GHZ protocol, optimizes
//! the hybrid cascaded/recursive-merging protocol by dynamic programming,
//! budgets crosstalk error and color counts, compiles spin-echo pulse
//! sequences, and verifies the protocols on small lattices with an exact
//! dense state-vector simulator.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod lattice;
pub mod tiling;
pub mod scaling;
pub mod eldredge;
pub mod hybrid;
pub mod crosstalk;
pub mod echo;
pub mod qsim;
pub mod cli;

pub use error::{Error, Result};
pub use lattice::{CouplingModel, Lattice, LatticeConfig};
