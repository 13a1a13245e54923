//! Dense least-squares kernels: ordinary least squares, non-negative least
//! squares and per-column sign-constrained least squares.
//!
//! Everything here is deterministic and allocation-local, so the functions
//! are safe to call from multiple threads at once.

#![allow(clippy::needless_range_loop)]

use ndarray::{Array1, ArrayView1, ArrayView2};

use crate::error::Error;
use crate::Result;

/// Per-column sign constraint for [`mixed_sign_ls`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignConstraint {
    /// Coordinate must be >= 0.
    NonNeg,
    /// Coordinate must be <= 0.
    NonPos,
    /// Coordinate is unconstrained.
    Free,
}

/// Outer-iteration cap for NNLS, as a multiple of the column count.
pub const NNLS_ITER_FACTOR: usize = 10;

/// Default NNLS stationarity tolerance, relative to `max|A^T y|`.
pub const DEFAULT_NNLS_TOL: f64 = 1e-10;

fn check_system(a: ArrayView2<f64>, y: ArrayView1<f64>) -> Result<()> {
    let (n, m) = a.dim();
    if n == 0 || m == 0 {
        return Err(Error::DimensionMismatch(format!(
            "matrix must be at least 1x1, got {n}x{m}"
        )));
    }
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {n} rows but right-hand side has {} entries",
            y.len()
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix entry".into()));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("right-hand side entry".into()));
    }
    Ok(())
}

/// Householder reflector acting on the tail `v[offset..]` of a vector.
struct Reflector {
    offset: usize,
    w: Array1<f64>,
    /// 2 / ||w||^2, or 0.0 for a no-op reflector.
    coef: f64,
}

impl Reflector {
    fn apply(&self, v: &mut Array1<f64>) {
        if self.coef == 0.0 {
            return;
        }
        let tail = v.slice(ndarray::s![self.offset..]);
        let dot = self.w.dot(&tail);
        if dot != 0.0 {
            let scale = self.coef * dot;
            let mut tail = v.slice_mut(ndarray::s![self.offset..]);
            tail.scaled_add(-scale, &self.w);
        }
    }
}

/// Householder QR with column pivoting of an n x m matrix held as columns.
///
/// Produces `A P = Q R` with the numerical rank detected from the pivoted
/// diagonal of R. `solve` returns the least-squares solution, picking the
/// minimum-norm one when the rank is deficient.
struct PivotedQr {
    reflectors: Vec<Reflector>,
    /// Upper-triangular factor, stored per factored column.
    r_cols: Vec<Array1<f64>>,
    perm: Vec<usize>,
    rank: usize,
    ncols: usize,
}

impl PivotedQr {
    fn factor(cols: &[Array1<f64>]) -> PivotedQr {
        let m = cols.len();
        let n = cols[0].len();
        let steps = n.min(m);
        let mut work: Vec<Array1<f64>> = cols.to_vec();
        let mut perm: Vec<usize> = (0..m).collect();
        let mut reflectors = Vec::with_capacity(steps);

        for k in 0..steps {
            // Pivot on the largest remaining column norm.
            let mut best = k;
            let mut best_norm = tail_sq_norm(&work[k], k);
            for j in k + 1..m {
                let nj = tail_sq_norm(&work[j], k);
                if nj > best_norm {
                    best = j;
                    best_norm = nj;
                }
            }
            work.swap(k, best);
            perm.swap(k, best);

            let norm = best_norm.sqrt();
            let refl = if norm == 0.0 {
                Reflector { offset: k, w: Array1::zeros(n - k), coef: 0.0 }
            } else {
                let head = work[k][k];
                let alpha = if head >= 0.0 { -norm } else { norm };
                let mut w = work[k].slice(ndarray::s![k..]).to_owned();
                w[0] = head - alpha;
                let wn = w.dot(&w);
                work[k][k] = alpha;
                work[k].slice_mut(ndarray::s![k + 1..]).fill(0.0);
                Reflector { offset: k, w, coef: if wn > 0.0 { 2.0 / wn } else { 0.0 } }
            };
            for col in work.iter_mut().skip(k + 1) {
                refl.apply(col);
            }
            reflectors.push(refl);
        }

        // Numerical rank from the pivoted diagonal, which is non-increasing
        // in magnitude.
        let r_max = work[0][0].abs();
        let thresh = r_max * (n.max(m) as f64) * f64::EPSILON;
        let mut rank = 0;
        for (k, col) in work.iter().enumerate().take(steps) {
            if col[k].abs() > thresh {
                rank = k + 1;
            } else {
                break;
            }
        }

        PivotedQr { reflectors, r_cols: work, perm, rank, ncols: m }
    }

    /// Least-squares solve; minimum-norm solution when rank < ncols.
    fn solve(&self, y: ArrayView1<f64>) -> Array1<f64> {
        let m = self.ncols;
        let r = self.rank;
        let mut x = Array1::zeros(m);
        if r == 0 {
            return x;
        }
        let mut u = y.to_owned();
        for refl in &self.reflectors {
            refl.apply(&mut u);
        }

        if r == m {
            // Back-substitution on the full triangle.
            let mut xp = Array1::zeros(m);
            for i in (0..m).rev() {
                let mut s = u[i];
                for j in i + 1..m {
                    s -= self.r_cols[j][i] * xp[j];
                }
                xp[i] = s / self.r_cols[i][i];
            }
            for j in 0..m {
                x[self.perm[j]] = xp[j];
            }
            return x;
        }

        // Rank-deficient: complete the orthogonal decomposition. Factor the
        // transpose of the leading r rows, R1^T = Z T (m x r, plain QR), so
        // R1 = T^T Z^T; then solve T^T w = u[..r] and map back with Z.
        let r1t: Vec<Array1<f64>> = (0..r)
            .map(|i| Array1::from_iter((0..m).map(|j| self.r_cols[j][i])))
            .collect();
        let (z_refl, t) = plain_qr(&r1t);

        // Forward substitution on the lower-triangular T^T.
        let mut w = Array1::zeros(r);
        for i in 0..r {
            let mut s = u[i];
            for j in 0..i {
                s -= t[i][j] * w[j];
            }
            w[i] = s / t[i][i];
        }

        // xp = Z [w; 0]: apply the reflectors in reverse.
        let mut xp = Array1::zeros(m);
        xp.slice_mut(ndarray::s![..r]).assign(&w);
        for refl in z_refl.iter().rev() {
            refl.apply(&mut xp);
        }
        for j in 0..m {
            x[self.perm[j]] = xp[j];
        }
        x
    }
}

fn tail_sq_norm(col: &Array1<f64>, from: usize) -> f64 {
    let tail = col.slice(ndarray::s![from..]);
    tail.dot(&tail)
}

/// Unpivoted Householder QR returning the reflectors and the columns of R.
fn plain_qr(cols: &[Array1<f64>]) -> (Vec<Reflector>, Vec<Array1<f64>>) {
    let m = cols.len();
    let n = cols[0].len();
    let steps = n.min(m);
    let mut work: Vec<Array1<f64>> = cols.to_vec();
    let mut reflectors = Vec::with_capacity(steps);
    for k in 0..steps {
        let norm = tail_sq_norm(&work[k], k).sqrt();
        let refl = if norm == 0.0 {
            Reflector { offset: k, w: Array1::zeros(n - k), coef: 0.0 }
        } else {
            let head = work[k][k];
            let alpha = if head >= 0.0 { -norm } else { norm };
            let mut w = work[k].slice(ndarray::s![k..]).to_owned();
            w[0] = head - alpha;
            let wn = w.dot(&w);
            work[k][k] = alpha;
            work[k].slice_mut(ndarray::s![k + 1..]).fill(0.0);
            Reflector { offset: k, w, coef: if wn > 0.0 { 2.0 / wn } else { 0.0 } }
        };
        for col in work.iter_mut().skip(k + 1) {
            refl.apply(col);
        }
        reflectors.push(refl);
    }
    (reflectors, work)
}

fn matrix_columns(a: ArrayView2<f64>) -> Vec<Array1<f64>> {
    (0..a.ncols()).map(|j| a.column(j).to_owned()).collect()
}

/// Solves `minimize ||A w - y||^2`, returning the minimum-norm minimizer
/// when `A` is rank deficient.
pub fn ols_solve(a: ArrayView2<f64>, y: ArrayView1<f64>) -> Result<Array1<f64>> {
    check_system(a, y)?;
    let cols = matrix_columns(a);
    Ok(PivotedQr::factor(&cols).solve(y))
}

/// Solves `minimize ||A x - y||^2` subject to `x >= 0` with the
/// Lawson-Hanson active-set method. Inner solves go through the same
/// pivoted-QR path as [`ols_solve`].
///
/// `tol` controls the stationarity test relative to `max|A^T y|`; the outer
/// iteration cap is [`NNLS_ITER_FACTOR`] times the column count.
pub fn nnls_solve(a: ArrayView2<f64>, y: ArrayView1<f64>, tol: f64) -> Result<Array1<f64>> {
    check_system(a, y)?;
    let cap = NNLS_ITER_FACTOR * a.ncols();
    nnls_on_columns(&matrix_columns(a), y, tol, cap)
}

/// [`nnls_solve`] with an explicit outer-iteration cap.
pub fn nnls_solve_capped(
    a: ArrayView2<f64>,
    y: ArrayView1<f64>,
    tol: f64,
    cap: usize,
) -> Result<Array1<f64>> {
    check_system(a, y)?;
    nnls_on_columns(&matrix_columns(a), y, tol, cap)
}

fn nnls_on_columns(
    cols: &[Array1<f64>],
    y: ArrayView1<f64>,
    tol: f64,
    cap: usize,
) -> Result<Array1<f64>> {
    let m = cols.len();
    if tol <= 0.0 {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }

    let aty_inf = cols.iter().map(|c| c.dot(&y).abs()).fold(0.0, f64::max);
    // Stop once every zero coordinate has w_j <= thresh, i.e. objective
    // gradient >= -tol * (1 + max|A^T y|).
    let thresh = 0.5 * tol * (1.0 + aty_inf);

    let mut x = Array1::<f64>::zeros(m);
    let mut passive = vec![false; m];
    let mut residual = y.to_owned();
    let mut outer = 0usize;

    loop {
        // Dual vector w = A^T (y - A x); candidates are zero coordinates
        // with positive w. `banned` marks columns rejected this round for
        // numerically dependent insertions.
        let w: Vec<f64> = cols.iter().map(|c| c.dot(&residual)).collect();
        let mut banned = vec![false; m];

        let accepted = loop {
            let mut pick: Option<usize> = None;
            for j in 0..m {
                if passive[j] || banned[j] || w[j] <= thresh {
                    continue;
                }
                if pick.is_none_or(|p| w[j] > w[p]) {
                    pick = Some(j);
                }
            }
            let Some(j) = pick else { break None };

            passive[j] = true;
            let z = solve_passive(cols, y, &passive);
            if z[j] > 0.0 {
                break Some(z);
            }
            passive[j] = false;
            banned[j] = true;
        };

        let Some(mut z) = accepted else {
            return Ok(x);
        };

        outer += 1;
        if outer > cap {
            return Err(Error::IterationCap { cap });
        }

        // Pull x toward z, dropping the blocking coordinate (and any other
        // that lands at zero), until the passive solve is feasible.
        loop {
            let mut alpha = f64::INFINITY;
            let mut blocker = None;
            for j in 0..m {
                if passive[j] && z[j] <= 0.0 {
                    let denom = x[j] - z[j];
                    let step = if denom > 0.0 { x[j] / denom } else { 0.0 };
                    if step < alpha {
                        alpha = step;
                        blocker = Some(j);
                    }
                }
            }
            let Some(blocker) = blocker else { break };
            for j in 0..m {
                if passive[j] {
                    x[j] += alpha * (z[j] - x[j]);
                }
            }
            x[blocker] = 0.0;
            passive[blocker] = false;
            for j in 0..m {
                if passive[j] && x[j] <= 0.0 {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
            if passive.iter().all(|p| !p) {
                break;
            }
            z = solve_passive(cols, y, &passive);
        }

        for j in 0..m {
            x[j] = if passive[j] { z[j] } else { 0.0 };
        }
        residual = y.to_owned();
        for j in 0..m {
            if x[j] != 0.0 {
                residual.scaled_add(-x[j], &cols[j]);
            }
        }
    }
}

/// Least-squares solve restricted to the passive columns; zeros elsewhere.
fn solve_passive(cols: &[Array1<f64>], y: ArrayView1<f64>, passive: &[bool]) -> Array1<f64> {
    let idx: Vec<usize> = (0..cols.len()).filter(|&j| passive[j]).collect();
    let sub: Vec<Array1<f64>> = idx.iter().map(|&j| cols[j].clone()).collect();
    let zp = PivotedQr::factor(&sub).solve(y);
    let mut z = Array1::zeros(cols.len());
    for (slot, &j) in idx.iter().enumerate() {
        z[j] = zp[slot];
    }
    z
}

/// Solves `minimize ||A x - y||^2` under per-column sign constraints.
///
/// Nonpositive columns are negated and free columns are split as
/// `x = x+ - x-`, turning the problem into an NNLS instance.
pub fn mixed_sign_ls(
    a: ArrayView2<f64>,
    y: ArrayView1<f64>,
    spec: &[SignConstraint],
    tol: f64,
) -> Result<Array1<f64>> {
    check_system(a, y)?;
    let m = a.ncols();
    if spec.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "sign spec has {} entries for {m} columns",
            spec.len()
        )));
    }

    if spec.iter().all(|s| *s == SignConstraint::Free) {
        return ols_solve(a, y);
    }
    if spec.iter().all(|s| *s == SignConstraint::NonNeg) {
        return nnls_solve(a, y, tol);
    }

    let mut cols: Vec<Array1<f64>> = Vec::new();
    // (original column, weight applied when mapping back)
    let mut back: Vec<(usize, f64)> = Vec::new();
    for j in 0..m {
        let col = a.column(j);
        match spec[j] {
            SignConstraint::NonNeg => {
                cols.push(col.to_owned());
                back.push((j, 1.0));
            }
            SignConstraint::NonPos => {
                cols.push(-&col.to_owned());
                back.push((j, -1.0));
            }
            SignConstraint::Free => {
                cols.push(col.to_owned());
                back.push((j, 1.0));
                cols.push(-&col.to_owned());
                back.push((j, -1.0));
            }
        }
    }

    let cap = NNLS_ITER_FACTOR * cols.len();
    let expanded = nnls_on_columns(&cols, y, tol, cap)?;
    let mut x = Array1::zeros(m);
    for (slot, &(j, weight)) in back.iter().enumerate() {
        x[j] += weight * expanded[slot];
    }
    Ok(x)
}

/// Squared residual `||A x - y||^2`.
pub fn sum_squared_residual(a: ArrayView2<f64>, x: ArrayView1<f64>, y: ArrayView1<f64>) -> f64 {
    let mut sse = 0.0;
    for (row, &target) in a.outer_iter().zip(y.iter()) {
        let r = row.dot(&x) - target;
        sse += r * r;
    }
    sse
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::{arr1, arr2};

    #[test]
    fn ols_identity_system() {
        let a = arr2(&[[1.0, 0.0], [0.0, 1.0]]);
        let y = arr1(&[3.0, -4.0]);
        let w = ols_solve(a.view(), y.view()).unwrap();
        assert_abs_diff_eq!(w[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w[1], -4.0, epsilon = 1e-12);
    }

    #[test]
    fn ols_constant_column_fits_mean() {
        let a = arr2(&[[1.0], [1.0]]);
        let y = arr1(&[1.0, 3.0]);
        let w = ols_solve(a.view(), y.view()).unwrap();
        assert_abs_diff_eq!(w[0], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn ols_residual_orthogonal_to_columns() {
        let a = arr2(&[
            [0.5, -1.2, 0.3],
            [1.5, 0.2, -0.7],
            [-0.3, 0.8, 1.1],
            [2.0, -0.5, 0.4],
            [0.1, 1.3, -0.9],
            [-1.1, 0.6, 0.2],
        ]);
        let y = arr1(&[1.0, -2.0, 0.5, 3.0, -1.5, 0.7]);
        let w = ols_solve(a.view(), y.view()).unwrap();
        let mut r = y.clone();
        for j in 0..3 {
            r.scaled_add(-w[j], &a.column(j).to_owned());
        }
        for j in 0..3 {
            assert!(a.column(j).dot(&r).abs() < 1e-9);
        }
    }

    #[test]
    fn ols_rank_deficient_is_minimum_norm() {
        // Duplicate columns: minimizers are x1 + x2 = 3, minimum norm splits
        // evenly.
        let a = arr2(&[[1.0, 1.0], [1.0, 1.0]]);
        let y = arr1(&[3.0, 3.0]);
        let w = ols_solve(a.view(), y.view()).unwrap();
        assert_abs_diff_eq!(w[0], 1.5, epsilon = 1e-10);
        assert_abs_diff_eq!(w[1], 1.5, epsilon = 1e-10);
    }

    #[test]
    fn ols_zero_matrix_returns_zero() {
        let a = arr2(&[[0.0, 0.0], [0.0, 0.0]]);
        let y = arr1(&[1.0, 2.0]);
        let w = ols_solve(a.view(), y.view()).unwrap();
        assert_eq!(w, arr1(&[0.0, 0.0]));
    }

    #[test]
    fn ols_rejects_dimension_mismatch() {
        let a = arr2(&[[1.0, 0.0], [0.0, 1.0]]);
        let y = arr1(&[1.0, 2.0, 3.0]);
        assert!(matches!(ols_solve(a.view(), y.view()), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn ols_rejects_non_finite() {
        let a = arr2(&[[1.0, f64::NAN], [0.0, 1.0]]);
        let y = arr1(&[1.0, 2.0]);
        assert!(matches!(ols_solve(a.view(), y.view()), Err(Error::NonFinite(_))));
    }

    #[test]
    fn nnls_projects_onto_orthant() {
        let a = arr2(&[[1.0, 0.0], [0.0, 1.0]]);
        let y = arr1(&[-1.0, 2.0]);
        let x = nnls_solve(a.view(), y.view(), 1e-10).unwrap();
        assert_abs_diff_eq!(x[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(x[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn nnls_keeps_feasible_optimum() {
        let a = arr2(&[[1.0, 0.0], [0.0, 1.0]]);
        let y = arr1(&[1.0, 2.0]);
        let x = nnls_solve(a.view(), y.view(), 1e-10).unwrap();
        assert_abs_diff_eq!(x[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(x[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn nnls_active_constraint_case() {
        let a = arr2(&[[1.0, 1.0], [0.0, 1.0]]);
        let y = arr1(&[1.0, -1.0]);
        let x = nnls_solve(a.view(), y.view(), 1e-10).unwrap();
        assert_abs_diff_eq!(x[0], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(x[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn nnls_zero_rhs() {
        let a = arr2(&[[1.0, 2.0], [3.0, 4.0]]);
        let y = arr1(&[0.0, 0.0]);
        let x = nnls_solve(a.view(), y.view(), 1e-10).unwrap();
        assert_eq!(x, arr1(&[0.0, 0.0]));
    }

    #[test]
    fn nnls_iteration_cap_errors() {
        let a = arr2(&[[1.0, 0.0], [0.0, 1.0]]);
        let y = arr1(&[1.0, 2.0]);
        assert!(matches!(
            nnls_solve_capped(a.view(), y.view(), 1e-10, 0),
            Err(Error::IterationCap { cap: 0 })
        ));
    }

    #[test]
    fn mixed_sign_reduces_to_ols_when_all_free() {
        let a = arr2(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.5]]);
        let y = arr1(&[1.0, -1.0, 2.0]);
        let free = vec![SignConstraint::Free; 2];
        let x = mixed_sign_ls(a.view(), y.view(), &free, 1e-10).unwrap();
        let w = ols_solve(a.view(), y.view()).unwrap();
        assert_abs_diff_eq!(x[0], w[0], epsilon = 1e-12);
        assert_abs_diff_eq!(x[1], w[1], epsilon = 1e-12);
    }

    #[test]
    fn mixed_sign_reduces_to_nnls_when_all_nonneg() {
        let a = arr2(&[[1.0, 1.0], [0.0, 1.0]]);
        let y = arr1(&[1.0, -1.0]);
        let spec = vec![SignConstraint::NonNeg; 2];
        let x = mixed_sign_ls(a.view(), y.view(), &spec, 1e-10).unwrap();
        let nn = nnls_solve(a.view(), y.view(), 1e-10).unwrap();
        assert_eq!(x, nn);
    }

    #[test]
    fn mixed_sign_independent_coordinates() {
        let a = arr2(&[[1.0, 0.0], [0.0, 1.0]]);
        let y = arr1(&[-1.0, 2.0]);
        let spec = [SignConstraint::NonPos, SignConstraint::NonNeg];
        let x = mixed_sign_ls(a.view(), y.view(), &spec, 1e-10).unwrap();
        assert_abs_diff_eq!(x[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(x[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn mixed_sign_split_variable_recovers_negative() {
        // One free column among constrained ones.
        let a = arr2(&[[1.0, 1.0], [0.0, 1.0]]);
        let y = arr1(&[0.0, -2.0]);
        let spec = [SignConstraint::NonNeg, SignConstraint::Free];
        let x = mixed_sign_ls(a.view(), y.view(), &spec, 1e-10).unwrap();
        assert!(x[0] >= 0.0);
        // Optimum: x0 = 2, x1 = -2 gives zero residual.
        assert_abs_diff_eq!(x[0], 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(x[1], -2.0, epsilon = 1e-9);
    }
}
