//! Numerical core for a two-component mixture wave system with
//! exponentially weighted fractional (Caputo-type) damping.
//!
//! The damping term is realized through its diffusive representation: a
//! family of first-order relaxation modes indexed by a frequency variable
//! `xi`, each driven by the velocity, whose weighted sum reproduces the
//! fractional derivative. After a cell-centered finite-volume discretization
//! in space the system becomes
//!
//! ```text
//! M U'' + K U + 2 c dxi sum_l mu_l Phi_l = 0
//! Phi_l' + (xi_l^2 + eta) Phi_l = mu_l U'
//! ```
//!
//! which is advanced with a Newmark-beta scheme for `U` coupled to a
//! Crank-Nicolson update for the modes, folded into one linear solve per
//! step.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, configuration and
//! the command-line harness live in the companion `fracmix` crate.

#![cfg_attr(not(test), no_std)]
// Index loops mirror the formulas; negated comparisons reject NaN inputs.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod banded;
pub mod decay;
mod error;
pub mod fracdiff;
pub mod grid;
pub mod initial;
pub mod integrator;
mod math;
pub mod operators;
pub mod sparse;
pub mod spectrum;

pub use error::{Error, Result};
pub use grid::GridSpec;
pub use integrator::{EnergyRecord, EnergyVariant, Integrator, NewmarkParams, SimState};
pub use operators::{DiffusiveGrid, MaterialParams, OperatorSet};
pub use sparse::{CsrMatrix, LinearOperator};

pub use num_complex::Complex64;
