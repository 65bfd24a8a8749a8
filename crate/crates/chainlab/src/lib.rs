//! Symbolic and numeric study of the Riccati and Abel equation chains.
//!
//! The two chains are towers of ODEs generated from the first-order Riccati
//! and Abel equations by the recursion `E_N = (D_x + u^m) E_(N-1)` with
//! `m = 1` and `m = 2`. This crate constructs the chains exactly, verifies
//! the nonlocal symmetry both families share over an exponential covering
//! system, proves the similarity reduction that maps each member down the
//! ladder, builds their closed-form general solutions, and cross-checks
//! everything numerically with an adaptive Runge-Kutta integrator.
//!
//! The main entry points, one per capability:
//!
//! - [`chains::generate_chain`] and [`chains::catalog_check`]
//! - [`symmetry::verify_determining_equations`] and
//!   [`symmetry::verify_invariance`]
//! - [`reduction::reduce_chain`] and [`reduction::reduction_ladder`]
//! - [`solutions::riccati_solution`], [`solutions::abel_solution`],
//!   [`solutions::verify_solution_symbolic`]
//! - [`numcheck::cross_check`] and [`numcheck::integrate`]
//! - [`parser::parse_expression`]
//!
//! Each has a runnable demonstration under `examples/`; start with
//! `cargo run --example chain_catalog`. The same functionality is scriptable
//! through the thin `chainlab` binary (see the README).
//!
//! All symbolic computation is exact: coefficients are arbitrary-precision
//! rationals and every verification returns an exact residual, never a
//! floating-point approximation. Numeric checks state their tolerances
//! explicitly.

pub mod chains;
pub mod cli;
pub mod kernel;
pub mod numcheck;
pub mod parser;
pub mod reduction;
pub mod report;
pub mod solutions;
pub mod symmetry;

pub use chains::{generate_chain, ChainEquation, ChainFamily};
pub use report::{CheckStatus, VerificationReport};
