//! Partitioned least squares solvers.
//!
//! Least squares regression where the features are partitioned into groups:
//! each group `k` carries a signed weight `beta[k]`, and the features inside
//! the group share a distribution of nonnegative weights `alpha` summing to
//! one. The fitted model predicts
//!
//! ```text
//! f(X)_n = sum_k beta[k] * sum_{m in P_k} alpha[m] * x[n, m]
//! ```
//!
//! The problem is non-convex (in fact NP-hard as soon as groups have two
//! members), so three solvers are provided:
//!
//! * [`solver::fit_alt`] — alternating least squares with multi-start;
//!   fast, monotone per restart, may stop in a local minimum.
//! * [`solver::fit_opt`] — exact: enumerates all `2^K` group sign vectors,
//!   solving one non-negative least squares problem per vector.
//! * [`solver::fit_bnb`] — exact: depth-first branch and bound over group
//!   sign constraints using unconstrained convex relaxations as bounds.
//!
//! The [`linalg`] module holds the dense OLS/NNLS kernels, [`model`] the
//! data model (partition, dataset, fitted model), and [`instances`] test
//! instance generators, including a subset-sum reduction with a closed-form
//! optimal value usable as a solver oracle.

pub mod error;
pub mod instances;
pub mod linalg;
pub mod model;
pub mod solver;

// Matrices and vectors in the public API are ndarray types; re-export the
// crate so downstream users stay on the same version.
pub use ndarray;

pub use error::Error;
pub use model::{Dataset, FitConfig, Model, Partition, RawSolution};
pub use solver::{fit_alt, fit_bnb, fit_opt, AltTrace, Diagnostics, FitReport};

/// Convenience alias for results produced by this crate.
pub type Result<T> = std::result::Result<T, Error>;
