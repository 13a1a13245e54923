//! The three solvers: alternating least squares, exhaustive sign-vector
//! enumeration, and branch and bound.

mod alt;
mod bnb;
mod opt;

pub use alt::{fit_alt, AltTrace, RestartTrace};
pub use bnb::{build_quadform, fit_bnb, lower_bound, violations, GroupSign, QuadForm};
pub use opt::{augment_regularization, fit_opt, signed_design};

use crate::model::Model;

/// Which algorithm produced a [`FitReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Alternating,
    Enumeration,
    BranchAndBound,
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Alternating => "alt",
            SolverKind::Enumeration => "opt",
            SolverKind::BranchAndBound => "bnb",
        }
    }
}

/// Counters describing the work a solver performed.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub solver: SolverKind,
    /// Restarts executed (alternating solver only).
    pub restarts: usize,
    /// Total alternating iterations across restarts.
    pub iterations: usize,
    /// Convex subproblems solved (OLS/NNLS calls for alt, sign vectors for
    /// opt, relaxations for bnb).
    pub subproblems: usize,
    /// Restarts re-initialized after collapsing to the zero model.
    pub degenerate_restarts: usize,
    /// Branch-and-bound nodes visited / pruned by bound.
    pub nodes_visited: usize,
    pub nodes_pruned: usize,
    /// False when the branch-and-bound node cap interrupted the search; the
    /// alternating solver never claims optimality.
    pub proven_optimal: bool,
    pub wall_seconds: f64,
}

impl Diagnostics {
    pub(crate) fn new(solver: SolverKind) -> Diagnostics {
        Diagnostics {
            solver,
            restarts: 0,
            iterations: 0,
            subproblems: 0,
            degenerate_restarts: 0,
            nodes_visited: 0,
            nodes_pruned: 0,
            proven_optimal: false,
            wall_seconds: 0.0,
        }
    }
}

/// Result of a fit: the objective value, the normalized model attaining it,
/// and solver counters.
#[derive(Debug, Clone)]
pub struct FitReport {
    pub objective: f64,
    pub model: Model,
    pub diagnostics: Diagnostics,
}
