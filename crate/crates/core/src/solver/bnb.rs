//! Branch and bound over group sign constraints.
//!
//! Dropping the group weights turns the problem into minimizing the convex
//! quadratic `||X a - y||^2` subject to the non-convex requirement that all
//! weights within a group share a sign. Each search node fixes the sign of
//! some groups and relaxes the rest; the relaxation is a sign-constrained
//! least squares problem whose optimum lower-bounds every completion of the
//! node. A node whose relaxation already satisfies the same-sign constraints
//! is feasible and updates the incumbent; otherwise the group with the
//! largest violation is branched on.

use std::time::Instant;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::Error;
use crate::linalg::{mixed_sign_ls, nnls_solve, sum_squared_residual, SignConstraint};
use crate::model::{renormalize, Dataset, FitConfig, Partition, RawSolution};
use crate::solver::opt::augment_regularization;
use crate::solver::{Diagnostics, FitReport, SolverKind};
use crate::Result;

/// Sign state of one group at a search node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupSign {
    Unconstrained,
    NonNeg,
    NonPos,
}

/// Quadratic form `a^T Q a + q^T a + q0` equal to the squared residual.
#[derive(Debug, Clone)]
pub struct QuadForm {
    pub quadratic: Array2<f64>,
    pub linear: Array1<f64>,
    pub constant: f64,
}

impl QuadForm {
    /// Evaluates the form at `alpha`.
    pub fn value(&self, alpha: ArrayView1<f64>) -> f64 {
        alpha.dot(&self.quadratic.dot(&alpha)) + self.linear.dot(&alpha) + self.constant
    }
}

/// Builds `Q = X^T X`, `q = -2 X^T y`, `q0 = y^T y` for a dataset. Any
/// regularization must already be folded into the dataset rows.
pub fn build_quadform(data: &Dataset) -> QuadForm {
    let x = data.x();
    let y = data.y();
    let xt = x.t();
    QuadForm {
        quadratic: xt.dot(x),
        linear: xt.dot(y).mapv(|v| -2.0 * v),
        constant: y.dot(y),
    }
}

fn column_spec(partition: &Partition, constraints: &[GroupSign]) -> Vec<SignConstraint> {
    (0..partition.num_features())
        .map(|m| match constraints[partition.group_of(m)] {
            GroupSign::Unconstrained => SignConstraint::Free,
            GroupSign::NonNeg => SignConstraint::NonNeg,
            GroupSign::NonPos => SignConstraint::NonPos,
        })
        .collect()
}

/// Solves the node relaxation: the least squares problem keeping only the
/// sign constraints of already-constrained groups. Returns the bound and
/// the attaining weights.
pub fn lower_bound(
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    partition: &Partition,
    constraints: &[GroupSign],
    tol: f64,
) -> Result<(f64, Array1<f64>)> {
    if constraints.len() != partition.num_groups() {
        return Err(Error::DimensionMismatch(format!(
            "{} constraint states for {} groups",
            constraints.len(),
            partition.num_groups()
        )));
    }
    let spec = column_spec(partition, constraints);
    let alpha = mixed_sign_ls(x, y, &spec, tol)?;
    let lb = sum_squared_residual(x, alpha.view(), y);
    Ok((lb, alpha))
}

/// Per-group same-sign violation: `nu_k = sum_{i,j in P_k} max(0, -a_i a_j)`
/// over ordered pairs. Zero exactly when all members of the group share a
/// weak sign.
pub fn violations(alpha: ArrayView1<f64>, partition: &Partition) -> Array1<f64> {
    Array1::from_iter(partition.groups().map(|members| {
        let mut nu = 0.0;
        for &i in members {
            for &j in members {
                nu += (-alpha[i] * alpha[j]).max(0.0);
            }
        }
        nu
    }))
}

struct Search<'a> {
    x: ArrayView2<'a, f64>,
    y: ArrayView1<'a, f64>,
    partition: &'a Partition,
    tol: f64,
    node_limit: usize,
    nodes_visited: usize,
    nodes_pruned: usize,
    capped: bool,
    incumbent: Option<(f64, RawSolution)>,
}

impl Search<'_> {
    /// Depth-first visit; returns the best objective known after exploring
    /// this branch (`min` of the entering bound and anything found below).
    fn visit(&mut self, constraints: &mut Vec<GroupSign>, upper: f64) -> Result<f64> {
        if self.nodes_visited >= self.node_limit {
            self.capped = true;
            return Ok(upper);
        }
        self.nodes_visited += 1;

        let (lb, alpha) = lower_bound(self.x, self.y, self.partition, constraints, self.tol)?;
        if lb >= upper {
            self.nodes_pruned += 1;
            return Ok(upper);
        }

        let nu = violations(alpha.view(), self.partition);
        let alpha_inf = alpha.fold(0.0f64, |acc, v| acc.max(v.abs()));
        let nu_tol = self.tol * (1.0 + alpha_inf * alpha_inf);
        let max_nu = nu.fold(0.0f64, |acc, &v| acc.max(v));

        if max_nu <= nu_tol {
            // Relaxation solution is feasible for the original problem:
            // it is optimal for this branch.
            self.record_incumbent(lb, &alpha);
            return Ok(lb);
        }

        let mut branch_group = 0;
        for (k, &v) in nu.iter().enumerate() {
            if v > nu[branch_group] {
                branch_group = k;
            }
        }

        constraints[branch_group] = GroupSign::NonNeg;
        let after_pos = self.visit(constraints, upper)?;
        constraints[branch_group] = GroupSign::NonPos;
        let after_neg = self.visit(constraints, after_pos)?;
        constraints[branch_group] = GroupSign::Unconstrained;
        Ok(after_neg)
    }

    fn record_incumbent(&mut self, objective: f64, alpha: &Array1<f64>) {
        if self.incumbent.as_ref().is_some_and(|(best, _)| objective >= *best) {
            return;
        }
        let mut signs = vec![1i8; self.partition.num_groups()];
        let mut raw = Array1::zeros(alpha.len());
        for (k, members) in self.partition.groups().enumerate() {
            let total: f64 = members.iter().map(|&m| alpha[m]).sum();
            signs[k] = if total >= 0.0 { 1 } else { -1 };
            for &m in members {
                // Roundoff can leave opposite-signed dust in a feasible
                // group; clamp it to zero rather than flip it.
                raw[m] = (f64::from(signs[k]) * alpha[m]).max(0.0);
            }
        }
        if let Ok(solution) = RawSolution::new(raw, signs) {
            self.incumbent = Some((objective, solution));
        }
    }
}

/// Exact fit by depth-first branch and bound on group signs.
///
/// Matches [`crate::solver::fit_opt`] on every instance while usually
/// solving far fewer relaxations. When `config.node_limit` interrupts the
/// search the best incumbent is returned with
/// `diagnostics.proven_optimal == false`.
pub fn fit_bnb(data: &Dataset, partition: &Partition, config: &FitConfig) -> Result<FitReport> {
    config.validate()?;
    if partition.num_features() != data.num_features() {
        return Err(Error::DimensionMismatch(format!(
            "partition covers {} features but dataset has {}",
            partition.num_features(),
            data.num_features()
        )));
    }
    let started = Instant::now();

    let (xw, yw) = if config.eta > 0.0 {
        augment_regularization(data.x().view(), data.y().view(), partition, config.eta)?
    } else {
        (data.x().clone(), data.y().clone())
    };

    let mut search = Search {
        x: xw.view(),
        y: yw.view(),
        partition,
        tol: config.tol,
        node_limit: config.node_limit,
        nodes_visited: 0,
        nodes_pruned: 0,
        capped: false,
        incumbent: None,
    };
    let mut constraints = vec![GroupSign::Unconstrained; partition.num_groups()];
    search.visit(&mut constraints, f64::INFINITY)?;

    let raw = match search.incumbent {
        Some((_, raw)) => raw,
        None => {
            // Node cap hit before any feasible node: fall back to the
            // all-nonnegative subproblem so an incumbent always exists.
            let alpha = nnls_solve(xw.view(), yw.view(), config.tol)?;
            RawSolution::new(alpha, vec![1i8; partition.num_groups()])?
        }
    };
    let model = renormalize(&raw, partition)?;
    let objective = crate::model::objective(&model, partition, data, config.eta)?;

    let mut diagnostics = Diagnostics::new(SolverKind::BranchAndBound);
    diagnostics.nodes_visited = search.nodes_visited;
    diagnostics.nodes_pruned = search.nodes_pruned;
    diagnostics.subproblems = search.nodes_visited;
    diagnostics.proven_optimal = !search.capped;
    diagnostics.wall_seconds = started.elapsed().as_secs_f64();
    Ok(FitReport { objective, model, diagnostics })
}
