//! Synthesis of candidate Lyapunov functions for smooth autonomous systems.
//!
//! A candidate is a truncated multivariate polynomial in the shifted state
//! `x - x̄` with no constant term. Its coefficients are evolved by a genetic
//! algorithm whose cost is the fraction of grid points in a box around the
//! equilibrium where either `L(x) > 0` or `∇L(x)·f(x) < 0` fails.
//!
//! Modules:
//! - [`polyform`]: multi-index basis, evaluation, exact gradients, text form.
//! - [`dynsys`]: expression parser and the vector field `ẋ = f(x)`.
//! - [`verifier`]: evaluation grid, point classification, cost `J`.
//! - [`evolver`]: the genetic algorithm.
//! - [`analysis`]: convergence bound, schema diagnostics, experiment sweeps.
//! - [`config`]: JSON configuration shared by the CLI and the sweep harness.

// `!(x > 0.0)` is used on purpose: a NaN must fail every strict test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod dynsys;
pub mod error;
pub mod evolver;
pub mod polyform;
pub mod verifier;

pub use dynsys::{Expr, VectorField};
pub use error::{Error, Result};
pub use evolver::{Alphabet, ClampMode, GaConfig, RunResult, RunTrace};
pub use polyform::{CandidatePolynomial, MultiIndex};
pub use verifier::{CostReport, GridSpec, Region, Verdict};
