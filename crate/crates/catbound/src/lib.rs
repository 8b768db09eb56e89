//! Cat states of a qubit entangled with a d-dimensional environment, and the
//! sharp bound on how alive such a cat can stay.
//!
//! The crate builds superpositions of an "alive" branch and a "dead" branch of
//! a joint qubit-environment system, reduces them to qubit density matrices,
//! and asks when the superposition is statistically indistinguishable from one
//! of its branches while the two branches remain maximally distinguishable
//! from each other. The answer is a closed-form family of states whose alive
//! probability equals 1/2 + sqrt(2)/4, roughly 0.854, and three independent
//! routes to that number live here:
//!
//! * [`catmodel`]: the closed-form construction and its feasibility algebra,
//! * [`optimizer`]: a penalty-method search that rediscovers the bound
//!   numerically without using the closed form,
//! * [`optimizer::sampling_oracle`]: a stochastic check that random
//!   near-feasible states never beat the bound.
//!
//! Supporting layers: [`linalg`] (complex vectors, a closed-form SVD of wide
//! 2-row matrices), [`quantum`] (kets, reduced density matrices, Bloch
//! geometry, Schmidt decomposition), and [`cli`] (the `catbound` command-line
//! front end with `verify`, `sweep`, `optimize`, `construct`).
//!
//! # Quick start
//!
//! ```
//! use catbound::catmodel;
//! use catbound::quantum;
//!
//! // The optimal triple over a 2-dimensional environment, canonical basis.
//! let triple = catmodel::construct_optimal_canonical(2).unwrap();
//! let rho_total = quantum::partial_trace_env(&triple.superposition);
//! let rho_alive = quantum::partial_trace_env(&triple.alive_branch);
//!
//! // The superposition is indistinguishable from its alive branch...
//! assert!(quantum::trace_distance(&rho_total, &rho_alive) < 1e-12);
//! // ...and as alive as any valid cat can be.
//! let p = quantum::p_alive(&rho_alive);
//! assert!((p - catmodel::optimal_alive_probability()).abs() < 1e-12);
//! ```

pub mod catmodel;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod optimizer;
pub mod quantum;

pub use error::{Error, Result};

/// Tolerance for exact algebraic identities (orthonormality, closed forms).
pub const TOL_ALGEBRAIC: f64 = 1e-12;

/// Tolerance for reconstruction-style checks that accumulate rounding
/// (SVD roundtrips, purity identities).
pub const TOL_RECONSTRUCTION: f64 = 1e-10;

/// Feasibility tolerance the numerical optimizer must reach.
pub const TOL_OPTIMIZER_FEASIBLE: f64 = 1e-8;
