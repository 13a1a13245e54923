// Each integration test binary compiles this module separately and uses a
// different subset of it.
#![allow(dead_code)]

//! Independent oracles for the solver tests.
//!
//! Everything here deliberately avoids the library's QR/NNLS code paths:
//! linear solves use Gaussian elimination on the normal equations, and the
//! constrained problems are solved by exhaustive enumeration (active sets
//! of the nonnegativity constraints, sign vectors, orthants).

use ndarray::{Array1, Array2};

/// Direct squared residual, written independently of the library helper.
pub fn sse(a: &Array2<f64>, x: &Array1<f64>, y: &Array1<f64>) -> f64 {
    let mut total = 0.0;
    for i in 0..a.nrows() {
        let mut pred = 0.0;
        for j in 0..a.ncols() {
            pred += a[(i, j)] * x[j];
        }
        let r = pred - y[i];
        total += r * r;
    }
    total
}

/// Gaussian elimination with partial pivoting. Returns `None` when a pivot
/// degenerates (singular system).
pub fn gauss_solve(a: &Array2<f64>, b: &Array1<f64>) -> Option<Array1<f64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    assert_eq!(n, b.len());
    let mut m = a.clone();
    let mut rhs = b.clone();
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);

    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if m[(row, col)].abs() > m[(pivot, col)].abs() {
                pivot = row;
            }
        }
        if m[(pivot, col)].abs() <= 1e-12 * scale {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(pivot, j)];
                m[(pivot, j)] = tmp;
            }
            rhs.swap(col, pivot);
        }
        for row in col + 1..n {
            let factor = m[(row, col)] / m[(col, col)];
            if factor != 0.0 {
                for j in col..n {
                    m[(row, j)] -= factor * m[(col, j)];
                }
                rhs[row] -= factor * rhs[col];
            }
        }
    }

    let mut x = Array1::zeros(n);
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for j in row + 1..n {
            acc -= m[(row, j)] * x[j];
        }
        x[row] = acc / m[(row, row)];
    }
    Some(x)
}

/// Normal-equations least squares: solves `(A^T A) w = A^T y` by Gaussian
/// elimination. Only valid for full-column-rank systems.
pub fn ols_normal_equations(a: &Array2<f64>, y: &Array1<f64>) -> Option<Array1<f64>> {
    let at = a.t();
    let gram = at.dot(a);
    let rhs = at.dot(y);
    gauss_solve(&gram, &rhs)
}

/// NNLS by enumeration of active sets: for every subset of coordinates
/// allowed to be nonzero, solve the unconstrained face problem and keep the
/// best feasible candidate. Exact for any instance where the optimal face
/// has a nonsingular Gram matrix (guaranteed up to recursion into smaller
/// faces, which the enumeration covers).
pub fn nnls_enumeration(a: &Array2<f64>, y: &Array1<f64>) -> (f64, Array1<f64>) {
    let m = a.ncols();
    assert!(m <= 16, "enumeration oracle limited to small column counts");
    let zero = Array1::zeros(m);
    let mut best_obj = sse(a, &zero, y);
    let mut best_x = zero;

    for mask in 1usize..(1 << m) {
        let free: Vec<usize> = (0..m).filter(|j| mask >> j & 1 == 1).collect();
        let p = free.len();
        let mut gram = Array2::zeros((p, p));
        let mut rhs = Array1::zeros(p);
        for (bi, &i) in free.iter().enumerate() {
            for (bj, &j) in free.iter().enumerate() {
                gram[(bi, bj)] = a.column(i).dot(&a.column(j));
            }
            rhs[bi] = a.column(i).dot(y);
        }
        let Some(sol) = gauss_solve(&gram, &rhs) else { continue };
        if sol.iter().any(|&v| v < -1e-9) {
            continue;
        }
        let mut x = Array1::zeros(m);
        for (bi, &j) in free.iter().enumerate() {
            x[j] = sol[bi].max(0.0);
        }
        let obj = sse(a, &x, y);
        if obj < best_obj {
            best_obj = obj;
            best_x = x;
        }
    }
    (best_obj, best_x)
}

/// Enumeration oracle for per-column sign-constrained least squares.
/// `spec` codes: +1 nonnegative, -1 nonpositive, 0 free. Same face
/// enumeration as [`nnls_enumeration`], keeping candidates whose signs are
/// admissible.
pub fn sign_constrained_enumeration(a: &Array2<f64>, y: &Array1<f64>, spec: &[i8]) -> f64 {
    let m = a.ncols();
    assert!(m <= 16, "enumeration oracle limited to small column counts");
    let zero = Array1::zeros(m);
    let mut best_obj = sse(a, &zero, y);

    for mask in 1usize..(1 << m) {
        let free: Vec<usize> = (0..m).filter(|j| mask >> j & 1 == 1).collect();
        let p = free.len();
        let mut gram = Array2::zeros((p, p));
        let mut rhs = Array1::zeros(p);
        for (bi, &i) in free.iter().enumerate() {
            for (bj, &j) in free.iter().enumerate() {
                gram[(bi, bj)] = a.column(i).dot(&a.column(j));
            }
            rhs[bi] = a.column(i).dot(y);
        }
        let Some(sol) = gauss_solve(&gram, &rhs) else { continue };
        let admissible = free.iter().enumerate().all(|(bi, &j)| match spec[j] {
            1 => sol[bi] >= -1e-9,
            -1 => sol[bi] <= 1e-9,
            _ => true,
        });
        if !admissible {
            continue;
        }
        let mut x = Array1::zeros(m);
        for (bi, &j) in free.iter().enumerate() {
            x[j] = sol[bi];
        }
        let obj = sse(a, &x, y);
        if obj < best_obj {
            best_obj = obj;
        }
    }
    best_obj
}

/// Brute-force global optimum of the partitioned problem: enumerate every
/// group sign vector and run the active-set enumeration per vector. The
/// `groups` argument lists the feature indices of each group.
pub fn partitioned_ls_enumeration(
    x: &Array2<f64>,
    y: &Array1<f64>,
    groups: &[Vec<usize>],
) -> f64 {
    let k = groups.len();
    let mut best = f64::INFINITY;
    for signs in 0usize..(1 << k) {
        let mut signed = x.clone();
        for (g, members) in groups.iter().enumerate() {
            if signs >> g & 1 == 1 {
                for &m in members {
                    for i in 0..signed.nrows() {
                        signed[(i, m)] = -signed[(i, m)];
                    }
                }
            }
        }
        let (obj, _) = nnls_enumeration(&signed, y);
        if obj < best {
            best = obj;
        }
    }
    best
}

/// Closed-form optimum of the one-group subset-sum reduction:
/// minimize `(a1 - a2 + s)^2 + rho (a1^2 + a2^2) + (a1 + a2)^2` subject to
/// `a1 a2 >= 0`, by checking each orthant's stationary point, edges and the
/// origin.
pub fn subset_sum_k1_closed_form(s: f64, rho: f64) -> f64 {
    let f = |a1: f64, a2: f64| {
        let d = a1 - a2 + s;
        d * d + rho * (a1 * a1 + a2 * a2) + (a1 + a2) * (a1 + a2)
    };
    let mut best = f(0.0, 0.0);

    for sigma in [1.0f64, -1.0] {
        // Substituting a_i = sigma g_i with g >= 0 gives a convex quadratic
        // in g; its gradient is linear:
        //   dg1: (2 + 2rho + 2) g1 + (-2 + 2) g2 + 2 sigma s = 0
        //   dg2: (-2 + 2) g1 + (2 + 2rho + 2) g2 - 2 sigma s = 0
        let a11 = 4.0 + 2.0 * rho;
        let a12 = 0.0;
        let a22 = 4.0 + 2.0 * rho;
        let b1 = -2.0 * sigma * s;
        let b2 = 2.0 * sigma * s;
        let det = a11 * a22 - a12 * a12;
        let g1 = (b1 * a22 - a12 * b2) / det;
        let g2 = (a11 * b2 - a12 * b1) / det;
        if g1 >= 0.0 && g2 >= 0.0 {
            best = best.min(f(sigma * g1, sigma * g2));
        }
        // Edge g1 = 0: f(0, sigma g2) minimized at the clamped vertex.
        let vertex2 = sigma * s / (2.0 + rho);
        let g2e = vertex2.max(0.0);
        best = best.min(f(0.0, sigma * g2e));
        // Edge g2 = 0.
        let vertex1 = -sigma * s / (2.0 + rho);
        let g1e = vertex1.max(0.0);
        best = best.min(f(sigma * g1e, 0.0));
    }
    best
}
