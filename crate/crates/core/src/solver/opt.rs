//! Exact solver: one NNLS subproblem per group sign vector.
//!
//! Fixing the sign vector `b` removes the group weights from the problem:
//! the residual becomes `||(X o signs) alpha - y||^2` over `alpha >= 0`,
//! which is convex. The minimum over all `2^K` sign vectors is the global
//! optimum, and the winning `(alpha, b)` renormalizes into a feasible model
//! with the same predictions.

use std::time::Instant;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::Error;
use crate::linalg::nnls_solve;
use crate::model::{renormalize, Dataset, FitConfig, Partition, RawSolution};
use crate::solver::{Diagnostics, FitReport, SolverKind};
use crate::Result;

/// Multiplies each column of `x` by the sign of its group.
pub fn signed_design(
    x: ArrayView2<f64>,
    partition: &Partition,
    signs: &[i8],
) -> Result<Array2<f64>> {
    if x.ncols() != partition.num_features() {
        return Err(Error::DimensionMismatch(format!(
            "design matrix has {} columns but partition covers {} features",
            x.ncols(),
            partition.num_features()
        )));
    }
    if signs.len() != partition.num_groups() {
        return Err(Error::DimensionMismatch(format!(
            "sign vector has {} entries but partition has {} groups",
            signs.len(),
            partition.num_groups()
        )));
    }
    if signs.iter().any(|&b| b != 1 && b != -1) {
        return Err(Error::InvalidInput("sign entries must be -1 or +1".into()));
    }
    let mut out = x.to_owned();
    for (m, mut col) in out.columns_mut().into_iter().enumerate() {
        let s = f64::from(signs[partition.group_of(m)]);
        if s < 0.0 {
            col.mapv_inplace(|v| -v);
        }
    }
    Ok(out)
}

/// Appends one row per group carrying `sqrt(rho)` on the group's columns
/// (and a zero target), so that the squared residual of the augmented
/// system exceeds the original one by `rho * sum_k (sum_{m in P_k} a_m)^2`.
pub fn augment_regularization(
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    partition: &Partition,
    rho: f64,
) -> Result<(Array2<f64>, Array1<f64>)> {
    if x.ncols() != partition.num_features() {
        return Err(Error::DimensionMismatch(format!(
            "design matrix has {} columns but partition covers {} features",
            x.ncols(),
            partition.num_features()
        )));
    }
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "design matrix has {} rows but target has {} entries",
            x.nrows(),
            y.len()
        )));
    }
    if !rho.is_finite() || rho < 0.0 {
        return Err(Error::InvalidInput(format!("rho must be >= 0, got {rho}")));
    }
    let (n, m) = x.dim();
    let k = partition.num_groups();
    let sqrt_rho = rho.sqrt();
    let mut xa = Array2::zeros((n + k, m));
    xa.slice_mut(ndarray::s![..n, ..]).assign(&x);
    for (g, members) in partition.groups().enumerate() {
        for &col in members {
            xa[(n + g, col)] = sqrt_rho;
        }
    }
    let mut ya = Array1::zeros(n + k);
    ya.slice_mut(ndarray::s![..n]).assign(&y);
    Ok((xa, ya))
}

/// Sign vector of candidate `index`, ordered so that increasing indices
/// enumerate sign vectors lexicographically with -1 before +1.
fn sign_vector(index: usize, groups: usize) -> Vec<i8> {
    (0..groups)
        .map(|k| if index >> (groups - 1 - k) & 1 == 1 { 1 } else { -1 })
        .collect()
}

struct Candidate {
    objective: f64,
    index: usize,
    alpha: Array1<f64>,
}

fn solve_candidate(
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    partition: &Partition,
    index: usize,
    tol: f64,
) -> Result<Candidate> {
    let signs = sign_vector(index, partition.num_groups());
    let a = signed_design(x, partition, &signs)?;
    let alpha = nnls_solve(a.view(), y, tol)?;
    let objective = crate::linalg::sum_squared_residual(a.view(), alpha.view(), y);
    Ok(Candidate { objective, index, alpha })
}

fn better(a: &Candidate, b: &Candidate) -> bool {
    a.objective < b.objective || (a.objective == b.objective && a.index < b.index)
}

/// Exact fit by complete enumeration of the `2^K` sign vectors.
///
/// Refuses to run when the group count exceeds `config.enumeration_cap`;
/// subproblems that fail numerically are skipped (fit fails only when every
/// one of them does). Ties between sign vectors break toward the
/// lexicographically smallest vector, making the result independent of the
/// evaluation schedule.
pub fn fit_opt(data: &Dataset, partition: &Partition, config: &FitConfig) -> Result<FitReport> {
    config.validate()?;
    let started = Instant::now();
    let k = partition.num_groups();
    if partition.num_features() != data.num_features() {
        return Err(Error::DimensionMismatch(format!(
            "partition covers {} features but dataset has {}",
            partition.num_features(),
            data.num_features()
        )));
    }
    if k > config.enumeration_cap {
        return Err(Error::EnumerationCap { groups: k, cap: config.enumeration_cap });
    }

    let (xw, yw) = if config.eta > 0.0 {
        augment_regularization(data.x().view(), data.y().view(), partition, config.eta)?
    } else {
        (data.x().clone(), data.y().clone())
    };

    let total = 1usize << k;
    let solve = |index: usize| solve_candidate(xw.view(), yw.view(), partition, index, config.tol);
    let reduce = |best: Option<Candidate>, cand: Result<Candidate>| match (best, cand) {
        (None, Ok(c)) => Some(c),
        (Some(b), Ok(c)) => Some(if better(&c, &b) { c } else { b }),
        (best, Err(_)) => best,
    };

    let best = if config.threads > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
        pool.install(|| {
            (0..total)
                .into_par_iter()
                .map(solve)
                .fold(|| None, reduce)
                .reduce(
                    || None,
                    |a, b| match (a, b) {
                        (Some(x), Some(y)) => Some(if better(&y, &x) { y } else { x }),
                        (x, None) => x,
                        (None, y) => y,
                    },
                )
        })
    } else {
        (0..total).map(solve).fold(None, reduce)
    };

    let best = best.ok_or(Error::AllSubproblemsFailed(total))?;
    let raw = RawSolution::new(best.alpha, sign_vector(best.index, k))?;
    let model = renormalize(&raw, partition)?;
    let objective = crate::model::objective(&model, partition, data, config.eta)?;

    let mut diagnostics = Diagnostics::new(SolverKind::Enumeration);
    diagnostics.subproblems = total;
    diagnostics.proven_optimal = true;
    diagnostics.wall_seconds = started.elapsed().as_secs_f64();
    Ok(FitReport { objective, model, diagnostics })
}
