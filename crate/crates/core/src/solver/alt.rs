//! Alternating least squares solver with multi-start.
//!
//! Each restart alternates two convex steps: with the distribution weights
//! fixed, the group weights solve an ordinary least squares problem on the
//! collapsed `N x K` design; with the group weights fixed, the distribution
//! weights solve a non-negative least squares problem on the sign-scaled
//! `N x M` design, after which the group sums are transferred back onto the
//! group weights to restore the sum-to-one constraints. Both steps minimize
//! the objective over their block, so the objective never increases within
//! a restart.

use std::time::Instant;

use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::linalg::{nnls_solve, ols_solve};
use crate::model::{objective, Dataset, FitConfig, Model, Partition};
use crate::solver::opt::augment_regularization;
use crate::solver::{Diagnostics, FitReport, SolverKind};
use crate::Result;

/// History of one restart: the objective after every half-step.
#[derive(Debug, Clone)]
pub struct RestartTrace {
    /// Objective at the random starting point, then after each completed
    /// half-step (group-weight step, then distribution step, alternating).
    pub objectives: Vec<f64>,
    pub final_objective: f64,
    /// Wall-clock seconds spent in this restart.
    pub seconds: f64,
}

/// Multi-start history: one trace per restart plus the cumulative time at
/// each restart completion.
#[derive(Debug, Clone)]
pub struct AltTrace {
    pub restarts: Vec<RestartTrace>,
    pub cumulative_seconds: Vec<f64>,
}

impl AltTrace {
    /// Running best final objective after each restart, in restart order.
    pub fn best_so_far(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.restarts
            .iter()
            .map(|r| {
                best = best.min(r.final_objective);
                best
            })
            .collect()
    }
}

struct RestartRun {
    model: Model,
    objective: f64,
    trace: RestartTrace,
    iterations: usize,
    subproblems: usize,
    reinits: usize,
}

/// Collapsed design `X (P o alpha)`: column k sums the group's columns
/// weighted by the distribution weights.
fn collapse_design(x: &Array2<f64>, partition: &Partition, alpha: &Array1<f64>) -> Array2<f64> {
    let mut xp = Array2::zeros((x.nrows(), partition.num_groups()));
    for (k, members) in partition.groups().enumerate() {
        let mut col = xp.column_mut(k);
        for &m in members {
            col.scaled_add(alpha[m], &x.column(m));
        }
    }
    xp
}

/// Per-feature design scaled by the group weight of each feature's group.
fn scaled_design(x: &Array2<f64>, partition: &Partition, beta: &Array1<f64>) -> Array2<f64> {
    let mut out = x.clone();
    for (m, mut col) in out.columns_mut().into_iter().enumerate() {
        let c = beta[partition.group_of(m)];
        col.mapv_inplace(|v| v * c);
    }
    out
}

fn random_feasible_alpha(rng: &mut ChaCha8Rng, partition: &Partition) -> Array1<f64> {
    let mut alpha = Array1::zeros(partition.num_features());
    for m in 0..partition.num_features() {
        alpha[m] = rng.gen::<f64>();
    }
    for members in partition.groups() {
        let sum: f64 = members.iter().map(|&m| alpha[m]).sum();
        if sum > 0.0 {
            for &m in members {
                alpha[m] /= sum;
            }
        } else {
            let uniform = 1.0 / members.len() as f64;
            for &m in members {
                alpha[m] = uniform;
            }
        }
    }
    alpha
}

const MAX_REINITS: usize = 3;

fn run_restart(
    data: &Dataset,
    partition: &Partition,
    config: &FitConfig,
    restart_index: usize,
) -> Result<RestartRun> {
    let started = Instant::now();
    let x = data.x();
    let y = data.y();
    let eta = config.eta;
    let k = partition.num_groups();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(restart_index as u64));
    let mut reinits = 0usize;
    let mut iterations = 0usize;
    let mut subproblems = 0usize;

    'attempt: loop {
        let mut alpha_hat = random_feasible_alpha(&mut rng, partition);
        let mut beta: Array1<f64> =
            Array1::from_iter((0..k).map(|_| rng.gen_range(-1.0..1.0)));
        let mut objectives = Vec::with_capacity(2 * config.iterations + 1);
        let start_model = Model { alpha_hat: alpha_hat.clone(), beta_hat: beta.clone() };
        objectives.push(objective(&start_model, partition, data, eta)?);
        let mut prev_obj = f64::INFINITY;

        for _ in 0..config.iterations {
            // Group-weight step: OLS on the collapsed design, ridge folded
            // in through extra sqrt(eta) identity rows.
            let xp = collapse_design(x, partition, &alpha_hat);
            let collapsed_zero = (0..k).any(|g| {
                xp.column(g).iter().all(|&v| v == 0.0)
                    && partition.group(g).iter().any(|&m| x.column(m).iter().any(|&v| v != 0.0))
            });
            if collapsed_zero && reinits < MAX_REINITS {
                reinits += 1;
                continue 'attempt;
            }
            beta = if eta > 0.0 {
                let mut xa = Array2::zeros((x.nrows() + k, k));
                xa.slice_mut(ndarray::s![..x.nrows(), ..]).assign(&xp);
                let sqrt_eta = eta.sqrt();
                for g in 0..k {
                    xa[(x.nrows() + g, g)] = sqrt_eta;
                }
                let mut ya = Array1::zeros(x.nrows() + k);
                ya.slice_mut(ndarray::s![..x.nrows()]).assign(y);
                ols_solve(xa.view(), ya.view())?
            } else {
                ols_solve(xp.view(), y.view())?
            };
            subproblems += 1;
            let model = Model { alpha_hat: alpha_hat.clone(), beta_hat: beta.clone() };
            objectives.push(objective(&model, partition, data, eta)?);

            // Distribution step: NNLS on the scaled design, then transfer
            // the group sums back onto the group weights.
            let a = scaled_design(x, partition, &beta);
            let alpha_raw = if eta > 0.0 {
                let (aa, ya) = augment_regularization(a.view(), y.view(), partition, eta)?;
                nnls_solve(aa.view(), ya.view(), config.tol)?
            } else {
                nnls_solve(a.view(), y.view(), config.tol)?
            };
            subproblems += 1;
            for (g, members) in partition.groups().enumerate() {
                let total: f64 = members.iter().map(|&m| alpha_raw[m]).sum();
                if total > 0.0 {
                    for &m in members {
                        alpha_hat[m] = alpha_raw[m] / total;
                    }
                } else {
                    let uniform = 1.0 / members.len() as f64;
                    for &m in members {
                        alpha_hat[m] = uniform;
                    }
                }
                beta[g] *= total;
            }
            let model = Model { alpha_hat: alpha_hat.clone(), beta_hat: beta.clone() };
            let obj = objective(&model, partition, data, eta)?;
            objectives.push(obj);
            iterations += 1;

            if (prev_obj - obj).abs() <= config.tol * (1.0 + obj.abs()) {
                break;
            }
            prev_obj = obj;
        }

        let model = Model { alpha_hat, beta_hat: beta };
        let final_objective = *objectives.last().expect("at least one iteration");
        return Ok(RestartRun {
            model,
            objective: final_objective,
            trace: RestartTrace {
                objectives,
                final_objective,
                seconds: started.elapsed().as_secs_f64(),
            },
            iterations,
            subproblems,
            reinits,
        });
    }
}

/// Multi-start alternating fit. Returns the best model over all restarts
/// together with the full per-restart trace.
///
/// Restart `i` draws its starting point from a generator seeded with
/// `config.seed + i`, so runs are reproducible and restarts can execute in
/// parallel without changing the result; ties between restarts break toward
/// the lower restart index.
pub fn fit_alt(
    data: &Dataset,
    partition: &Partition,
    config: &FitConfig,
) -> Result<(FitReport, AltTrace)> {
    config.validate()?;
    if partition.num_features() != data.num_features() {
        return Err(Error::DimensionMismatch(format!(
            "partition covers {} features but dataset has {}",
            partition.num_features(),
            data.num_features()
        )));
    }
    let started = Instant::now();

    let runs: Vec<Result<RestartRun>> = if config.threads > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
        pool.install(|| {
            (0..config.restarts)
                .into_par_iter()
                .map(|i| run_restart(data, partition, config, i))
                .collect()
        })
    } else {
        (0..config.restarts).map(|i| run_restart(data, partition, config, i)).collect()
    };
    let runs: Vec<RestartRun> = runs.into_iter().collect::<Result<_>>()?;

    let best = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| {
            a.objective.partial_cmp(&b.objective).unwrap().then(i.cmp(j))
        })
        .map(|(i, _)| i)
        .expect("restarts >= 1");

    let feasibility = crate::model::validate(
        &runs[best].model,
        partition,
        crate::model::DEFAULT_FEASIBILITY_TOL,
    )?;
    if !feasibility.passed {
        return Err(Error::InvalidInput(format!(
            "alternating solver produced an infeasible model (min weight {}, sum deviation {})",
            feasibility.min_alpha, feasibility.max_sum_deviation
        )));
    }

    let mut diagnostics = Diagnostics::new(SolverKind::Alternating);
    diagnostics.restarts = config.restarts;
    diagnostics.iterations = runs.iter().map(|r| r.iterations).sum();
    diagnostics.subproblems = runs.iter().map(|r| r.subproblems).sum();
    diagnostics.degenerate_restarts = runs.iter().map(|r| r.reinits).sum();
    diagnostics.wall_seconds = started.elapsed().as_secs_f64();

    let mut cumulative_seconds = Vec::with_capacity(runs.len());
    let mut acc = 0.0;
    for run in &runs {
        acc += run.trace.seconds;
        cumulative_seconds.push(acc);
    }

    let report = FitReport {
        objective: runs[best].objective,
        model: runs[best].model.clone(),
        diagnostics,
    };
    let trace = AltTrace {
        restarts: runs.into_iter().map(|r| r.trace).collect(),
        cumulative_seconds,
    };
    Ok((report, trace))
}
