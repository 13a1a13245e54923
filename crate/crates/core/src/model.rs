//! Core data model: feature partitions, datasets, the raw `(alpha, b)`
//! parameterization and the normalized `(alpha_hat, beta_hat)` model.

use ndarray::{Array1, Array2, ArrayView2};

use crate::error::Error;
use crate::Result;

/// Default tolerance for feasibility checks on fitted models.
pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-9;

/// Assignment of each feature to exactly one group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    /// Group index of each feature, length M.
    assignments: Vec<usize>,
    /// Feature indices of each group, length K; every group non-empty.
    groups: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds a partition from per-feature group indices in `0..group_count`.
    pub fn from_assignments(assignments: Vec<usize>, group_count: usize) -> Result<Partition> {
        if assignments.is_empty() || group_count == 0 {
            return Err(Error::InvalidInput("partition must be non-empty".into()));
        }
        let mut groups = vec![Vec::new(); group_count];
        for (m, &k) in assignments.iter().enumerate() {
            if k >= group_count {
                return Err(Error::InvalidInput(format!(
                    "feature {m} assigned to group {k}, but only {group_count} groups exist"
                )));
            }
            groups[k].push(m);
        }
        if let Some(k) = groups.iter().position(|g| g.is_empty()) {
            return Err(Error::InvalidInput(format!("group {k} is empty")));
        }
        Ok(Partition { assignments, groups })
    }

    /// Builds a partition from explicit member lists covering `0..feature_count`.
    pub fn from_groups(groups: Vec<Vec<usize>>, feature_count: usize) -> Result<Partition> {
        if groups.is_empty() || feature_count == 0 {
            return Err(Error::InvalidInput("partition must be non-empty".into()));
        }
        let mut assignments = vec![usize::MAX; feature_count];
        for (k, members) in groups.iter().enumerate() {
            if members.is_empty() {
                return Err(Error::InvalidInput(format!("group {k} is empty")));
            }
            for &m in members {
                if m >= feature_count {
                    return Err(Error::InvalidInput(format!(
                        "group {k} references feature {m}, but only {feature_count} features exist"
                    )));
                }
                if assignments[m] != usize::MAX {
                    return Err(Error::InvalidInput(format!(
                        "feature {m} appears in groups {} and {k}",
                        assignments[m]
                    )));
                }
                assignments[m] = k;
            }
        }
        if let Some(m) = assignments.iter().position(|&k| k == usize::MAX) {
            return Err(Error::InvalidInput(format!("feature {m} belongs to no group")));
        }
        Ok(Partition { assignments, groups })
    }

    /// One group holding all `feature_count` features.
    pub fn single_group(feature_count: usize) -> Partition {
        Partition::from_assignments(vec![0; feature_count], 1).expect("non-empty")
    }

    /// One singleton group per feature.
    pub fn singletons(feature_count: usize) -> Partition {
        Partition::from_assignments((0..feature_count).collect(), feature_count).expect("non-empty")
    }

    /// Number of features M.
    pub fn num_features(&self) -> usize {
        self.assignments.len()
    }

    /// Number of groups K.
    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    /// Feature indices of group `k`.
    pub fn group(&self, k: usize) -> &[usize] {
        &self.groups[k]
    }

    /// Iterator over the member lists of all groups.
    pub fn groups(&self) -> impl Iterator<Item = &[usize]> {
        self.groups.iter().map(|g| g.as_slice())
    }

    /// Group index of feature `m`.
    pub fn group_of(&self, m: usize) -> usize {
        self.assignments[m]
    }

    /// Per-feature group indices.
    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    /// Appends a new singleton group holding one new feature (the intercept
    /// column added by [`Dataset::to_homogeneous`]).
    fn with_intercept_group(&self) -> Partition {
        let mut assignments = self.assignments.clone();
        assignments.push(self.groups.len());
        let mut groups = self.groups.clone();
        groups.push(vec![assignments.len() - 1]);
        Partition { assignments, groups }
    }

    /// Per-group sums of a per-feature vector (`P^T v`).
    pub fn group_sums(&self, v: &Array1<f64>) -> Array1<f64> {
        Array1::from_iter(self.groups.iter().map(|g| g.iter().map(|&m| v[m]).sum()))
    }
}

/// A design matrix with its target vector.
#[derive(Debug, Clone)]
pub struct Dataset {
    x: Array2<f64>,
    y: Array1<f64>,
    homogeneous: bool,
}

impl Dataset {
    pub fn new(x: Array2<f64>, y: Array1<f64>) -> Result<Dataset> {
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "design matrix must be at least 1x1, got {}x{}",
                x.nrows(),
                x.ncols()
            )));
        }
        if x.nrows() != y.len() {
            return Err(Error::DimensionMismatch(format!(
                "design matrix has {} rows but target has {} entries",
                x.nrows(),
                y.len()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("design matrix entry".into()));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("target entry".into()));
        }
        Ok(Dataset { x, y, homogeneous: false })
    }

    pub fn x(&self) -> &Array2<f64> {
        &self.x
    }

    pub fn y(&self) -> &Array1<f64> {
        &self.y
    }

    pub fn num_rows(&self) -> usize {
        self.x.nrows()
    }

    pub fn num_features(&self) -> usize {
        self.x.ncols()
    }

    /// Whether an intercept column and group have been appended.
    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous
    }

    /// Appends an all-ones column to X and a singleton group to the
    /// partition, absorbing the intercept into an extra group weight.
    pub fn to_homogeneous(&self, partition: &Partition) -> Result<(Dataset, Partition)> {
        if self.homogeneous {
            return Err(Error::InvalidInput("dataset is already in homogeneous coordinates".into()));
        }
        if partition.num_features() != self.num_features() {
            return Err(Error::DimensionMismatch(format!(
                "partition covers {} features but dataset has {}",
                partition.num_features(),
                self.num_features()
            )));
        }
        let mut x = self.x.clone();
        x.push_column(Array1::ones(self.num_rows()).view())
            .expect("column length matches row count");
        let dataset = Dataset { x, y: self.y.clone(), homogeneous: true };
        Ok((dataset, partition.with_intercept_group()))
    }
}

/// Solution in the sign-vector parameterization: nonnegative per-feature
/// weights plus a `{-1,+1}` sign per group.
#[derive(Debug, Clone)]
pub struct RawSolution {
    pub alpha: Array1<f64>,
    pub signs: Vec<i8>,
}

impl RawSolution {
    pub fn new(alpha: Array1<f64>, signs: Vec<i8>) -> Result<RawSolution> {
        if alpha.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(Error::InvalidInput("alpha entries must be finite and nonnegative".into()));
        }
        if signs.iter().any(|&b| b != 1 && b != -1) {
            return Err(Error::InvalidInput("sign entries must be -1 or +1".into()));
        }
        Ok(RawSolution { alpha, signs })
    }
}

/// Fitted model: per-feature distribution weights (summing to one within
/// each group) and signed per-group weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub alpha_hat: Array1<f64>,
    pub beta_hat: Array1<f64>,
}

/// Solver configuration shared by all three solvers.
#[derive(Debug, Clone)]
pub struct FitConfig {
    /// Regularization strength applied to the group weights.
    pub eta: f64,
    /// Inner iterations per restart of the alternating solver.
    pub iterations: usize,
    /// Number of random restarts of the alternating solver.
    pub restarts: usize,
    /// Seed for restart initialization and instance generation.
    pub seed: u64,
    /// Numerical tolerance for kernels and stopping tests.
    pub tol: f64,
    /// Node cap for the branch-and-bound solver.
    pub node_limit: usize,
    /// Sign-vector cap for the exact solver, as an exponent: enumeration
    /// refuses to run when K exceeds this.
    pub enumeration_cap: usize,
    /// Worker threads for restart/subproblem parallelism (1 = sequential).
    pub threads: usize,
}

impl Default for FitConfig {
    fn default() -> FitConfig {
        FitConfig {
            eta: 0.0,
            iterations: 20,
            restarts: 100,
            seed: 0,
            tol: 1e-10,
            node_limit: 1 << 20,
            enumeration_cap: 25,
            threads: 1,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.eta.is_finite() || self.eta < 0.0 {
            return Err(Error::InvalidInput(format!("eta must be >= 0, got {}", self.eta)));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidInput("iterations must be >= 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidInput("restarts must be >= 1".into()));
        }
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(Error::InvalidInput(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.node_limit == 0 {
            return Err(Error::InvalidInput("node_limit must be >= 1".into()));
        }
        Ok(())
    }
}

/// Feasibility summary produced by [`validate`].
#[derive(Debug, Clone, Copy)]
pub struct FeasibilityReport {
    /// Smallest distribution weight (negative values are violations).
    pub min_alpha: f64,
    /// Largest deviation of a group weight sum from one.
    pub max_sum_deviation: f64,
    pub passed: bool,
}

fn check_model_dims(model: &Model, partition: &Partition) -> Result<()> {
    if model.alpha_hat.len() != partition.num_features() {
        return Err(Error::DimensionMismatch(format!(
            "model has {} feature weights but partition covers {} features",
            model.alpha_hat.len(),
            partition.num_features()
        )));
    }
    if model.beta_hat.len() != partition.num_groups() {
        return Err(Error::DimensionMismatch(format!(
            "model has {} group weights but partition has {} groups",
            model.beta_hat.len(),
            partition.num_groups()
        )));
    }
    Ok(())
}

/// Predicted targets: entry n is `sum_k beta_hat[k] * sum_{m in P_k}
/// alpha_hat[m] * x[n, m]`.
pub fn predict(model: &Model, partition: &Partition, x: ArrayView2<f64>) -> Result<Array1<f64>> {
    check_model_dims(model, partition)?;
    if x.ncols() != partition.num_features() {
        return Err(Error::DimensionMismatch(format!(
            "design matrix has {} columns but partition covers {} features",
            x.ncols(),
            partition.num_features()
        )));
    }
    // Collapse to effective per-feature weights beta[k[m]] * alpha[m].
    let weights = Array1::from_iter(
        model
            .alpha_hat
            .iter()
            .enumerate()
            .map(|(m, &a)| a * model.beta_hat[partition.group_of(m)]),
    );
    Ok(x.dot(&weights))
}

/// Regularized objective: squared residual plus `eta * ||beta_hat||^2`.
pub fn objective(model: &Model, partition: &Partition, data: &Dataset, eta: f64) -> Result<f64> {
    let pred = predict(model, partition, data.x().view())?;
    let sse = (&pred - data.y()).mapv(|r| r * r).sum();
    Ok(sse + eta * model.beta_hat.dot(&model.beta_hat))
}

/// Converts a raw `(alpha, b)` solution into a normalized model with the
/// same predictions: group weight sums move into `beta_hat`, within-group
/// weights become distributions. Groups with zero weight sum fall back to
/// the uniform distribution.
pub fn renormalize(raw: &RawSolution, partition: &Partition) -> Result<Model> {
    if raw.alpha.len() != partition.num_features() {
        return Err(Error::DimensionMismatch(format!(
            "raw solution has {} weights but partition covers {} features",
            raw.alpha.len(),
            partition.num_features()
        )));
    }
    if raw.signs.len() != partition.num_groups() {
        return Err(Error::DimensionMismatch(format!(
            "raw solution has {} signs but partition has {} groups",
            raw.signs.len(),
            partition.num_groups()
        )));
    }
    let mut alpha_hat = Array1::zeros(raw.alpha.len());
    let mut beta_hat = Array1::zeros(partition.num_groups());
    for (k, members) in partition.groups().enumerate() {
        let total: f64 = members.iter().map(|&m| raw.alpha[m]).sum();
        if total > 0.0 {
            for &m in members {
                alpha_hat[m] = raw.alpha[m] / total;
            }
        } else {
            let uniform = 1.0 / members.len() as f64;
            for &m in members {
                alpha_hat[m] = uniform;
            }
        }
        beta_hat[k] = f64::from(raw.signs[k]) * total;
    }
    Ok(Model { alpha_hat, beta_hat })
}

/// Checks the distribution constraints on a model: nonnegative weights and
/// per-group sums equal to one, both within `tol`.
pub fn validate(model: &Model, partition: &Partition, tol: f64) -> Result<FeasibilityReport> {
    check_model_dims(model, partition)?;
    let min_alpha = model.alpha_hat.iter().copied().fold(f64::INFINITY, f64::min);
    let max_sum_deviation = partition
        .groups()
        .map(|members| {
            let sum: f64 = members.iter().map(|&m| model.alpha_hat[m]).sum();
            (sum - 1.0).abs()
        })
        .fold(0.0, f64::max);
    Ok(FeasibilityReport {
        min_alpha,
        max_sum_deviation,
        passed: min_alpha >= -tol && max_sum_deviation <= tol,
    })
}

/// Predictions of a raw solution without renormalizing: `X (P o alpha) b`.
pub fn predict_raw(raw: &RawSolution, partition: &Partition, x: ArrayView2<f64>) -> Array1<f64> {
    let weights = Array1::from_iter(
        raw.alpha
            .iter()
            .enumerate()
            .map(|(m, &a)| a * f64::from(raw.signs[partition.group_of(m)])),
    );
    x.dot(&weights)
}

/// Squared residual of a prediction vector against the dataset target.
pub fn residual_sse(pred: &Array1<f64>, y: &Array1<f64>) -> f64 {
    pred.iter().zip(y.iter()).map(|(p, t)| (p - t) * (p - t)).sum()
}
