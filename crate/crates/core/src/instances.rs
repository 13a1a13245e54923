//! Test-instance generators.
//!
//! [`gen_subset_sum`] maps a subset-sum instance onto a two-features-per-
//! group least squares problem whose optimal value has a closed form
//! ([`closed_form_value`]) exactly when the subset-sum instance is solvable.
//! This gives the solvers an independent correctness oracle (and shows the
//! problem is NP-hard). [`gen_random`] produces seeded random instances with
//! a planted feasible model for property tests.

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Error;
use crate::model::{predict, Dataset, FitConfig, Model, Partition};
use crate::solver::{fit_bnb, fit_opt};
use crate::Result;

/// A subset-sum instance: positive integers and the penalty weight baked
/// into the generated design matrix.
#[derive(Debug, Clone)]
pub struct SubsetSumInstance {
    values: Vec<u64>,
    rho: f64,
}

impl SubsetSumInstance {
    pub fn new(values: Vec<u64>, rho: f64) -> Result<SubsetSumInstance> {
        if values.is_empty() {
            return Err(Error::InvalidInput("subset-sum instance needs at least one value".into()));
        }
        if values.contains(&0) {
            return Err(Error::InvalidInput("subset-sum values must be positive".into()));
        }
        if !rho.is_finite() || rho <= 0.0 {
            return Err(Error::InvalidInput(format!("rho must be positive, got {rho}")));
        }
        Ok(SubsetSumInstance { values, rho })
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

/// Which exact solver [`subset_sum_decide`] runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactSolver {
    Enumeration,
    BranchAndBound,
}

/// Builds the reduction instance: `M = 2K` features in `K` two-member
/// groups and `N = 3K + 1` rows. Row `k` pits the group's two features
/// against each other with target `-s_k`; two penalty rows per group carry
/// `sqrt(rho)`; the final all-ones row couples the groups. No intercept is
/// added.
pub fn gen_subset_sum(inst: &SubsetSumInstance) -> (Dataset, Partition) {
    let k = inst.values.len();
    let n = 3 * k + 1;
    let m = 2 * k;
    let sqrt_rho = inst.rho.sqrt();

    let mut x = Array2::zeros((n, m));
    let mut y = Array1::zeros(n);
    for (g, &s) in inst.values.iter().enumerate() {
        let first = 2 * g;
        let second = 2 * g + 1;
        x[(g, first)] = 1.0;
        x[(g, second)] = -1.0;
        y[g] = -(s as f64);
        x[(k + g, first)] = sqrt_rho;
        x[(2 * k + g, second)] = sqrt_rho;
    }
    for col in 0..m {
        x[(n - 1, col)] = 1.0;
    }

    let partition =
        Partition::from_groups((0..k).map(|g| vec![2 * g, 2 * g + 1]).collect(), m)
            .expect("two-member groups cover all features");
    let dataset = Dataset::new(x, y).expect("finite generated data");
    (dataset, partition)
}

/// The closed-form candidate optimum `rho * sum s_k^2 / (1 + rho)`: the
/// true optimum when the subset-sum instance is solvable, and a strict
/// lower bound otherwise.
pub fn closed_form_value(inst: &SubsetSumInstance) -> f64 {
    let sum_sq: f64 = inst.values.iter().map(|&s| (s as f64) * (s as f64)).sum();
    inst.rho * sum_sq / (1.0 + inst.rho)
}

/// Decides a subset-sum instance by solving the reduction and comparing the
/// objective against the closed-form value; `tol` scales with that value.
pub fn subset_sum_decide(
    inst: &SubsetSumInstance,
    solver: ExactSolver,
    tol: f64,
) -> Result<bool> {
    let (data, partition) = gen_subset_sum(inst);
    // rho already lives inside the generated rows; no extra regularization.
    let config = FitConfig { eta: 0.0, ..FitConfig::default() };
    let report = match solver {
        ExactSolver::Enumeration => fit_opt(&data, &partition, &config)?,
        ExactSolver::BranchAndBound => fit_bnb(&data, &partition, &config)?,
    };
    let value = closed_form_value(inst);
    Ok(report.objective <= value + tol * (1.0 + value))
}

/// Seeded random instance: standard normal design, round-robin groups
/// shuffled by the seed, and targets generated from a planted feasible
/// model plus Gaussian noise. Returns the planted model alongside the data.
pub fn gen_random(
    rows: usize,
    features: usize,
    groups: usize,
    seed: u64,
    noise: f64,
) -> Result<(Dataset, Partition, Model)> {
    if rows == 0 || groups == 0 || features < groups {
        return Err(Error::InvalidInput(format!(
            "need rows >= 1 and features >= groups >= 1, got {rows}x{features} with {groups} groups"
        )));
    }
    if !noise.is_finite() || noise < 0.0 {
        return Err(Error::InvalidInput(format!("noise must be >= 0, got {noise}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut x = Array2::zeros((rows, features));
    for v in x.iter_mut() {
        *v = rng.sample(StandardNormal);
    }

    let mut assignments: Vec<usize> = (0..features).map(|m| m % groups).collect();
    assignments.shuffle(&mut rng);
    let partition = Partition::from_assignments(assignments, groups)?;

    let mut alpha_hat = Array1::zeros(features);
    for members in partition.groups() {
        let mut sum = 0.0;
        for &m in members {
            alpha_hat[m] = rng.gen::<f64>();
            sum += alpha_hat[m];
        }
        if sum > 0.0 {
            for &m in members {
                alpha_hat[m] /= sum;
            }
        } else {
            for &m in members {
                alpha_hat[m] = 1.0 / members.len() as f64;
            }
        }
    }
    let beta_hat = Array1::from_iter((0..groups).map(|_| rng.gen_range(-2.0..2.0)));
    let planted = Model { alpha_hat, beta_hat };

    let mut y = predict(&planted, &partition, x.view())?;
    if noise > 0.0 {
        for v in y.iter_mut() {
            let e: f64 = rng.sample(StandardNormal);
            *v += noise * e;
        }
    }
    let dataset = Dataset::new(x, y)?;
    Ok((dataset, partition, planted))
}
