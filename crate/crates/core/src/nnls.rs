//! Nonnegative least squares (Lawson–Hanson active set) and the least-distance
//! program built on it.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::linalg::{from_columns, lstsq};
use crate::{Error, Result};

/// Solves `min ‖A·λ − b‖₂` subject to `λ ≥ 0`, where `A` has the given columns
/// (each of length `b.len()`). The outer loop is capped at `100·max(k, 1)`
/// iterations for `k` columns.
pub fn nnls(columns: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let m = b.len();
    let k = columns.len();
    if let Some(c) = columns.iter().find(|c| c.len() != m) {
        return Err(Error::DimensionMismatch { expected: m, found: c.len() });
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let a = from_columns(columns, m);
    nnls_matrix(&a, &DVector::from_column_slice(b)).map(|x| x.iter().cloned().collect())
}

pub(crate) fn nnls_matrix(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let k = a.ncols();
    let max_iter = 100 * k.max(1);
    let anorm = a.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
    let tol = 10.0 * f64::EPSILON * anorm * (a.nrows().max(k) as f64) * (1.0 + b.amax());

    let mut x = DVector::<f64>::zeros(k);
    let mut passive = vec![false; k];
    let mut iterations = 0;

    loop {
        let residual = b - a * &x;
        let w = a.transpose() * residual;
        let mut best: Option<usize> = None;
        for j in 0..k {
            if !passive[j] && w[j] > tol && best.is_none_or(|b| w[j] > w[b]) {
                best = Some(j);
            }
        }
        let Some(enter) = best else { break };
        passive[enter] = true;

        loop {
            iterations += 1;
            if iterations > max_iter {
                return Err(Error::NnlsNoConvergence { iterations });
            }
            let idx: Vec<usize> = (0..k).filter(|&j| passive[j]).collect();
            let sub = a.select_columns(&idx);
            let z_p = lstsq(&sub, b);
            if z_p.iter().all(|&v| v > 0.0) {
                x.fill(0.0);
                for (p, &j) in idx.iter().enumerate() {
                    x[j] = z_p[p];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (p, &j) in idx.iter().enumerate() {
                if z_p[p] <= 0.0 {
                    let step = x[j] / (x[j] - z_p[p]);
                    if step < alpha {
                        alpha = step;
                    }
                }
            }
            for (p, &j) in idx.iter().enumerate() {
                x[j] += alpha * (z_p[p] - x[j]);
            }
            for &j in &idx {
                if x[j] <= tol {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    Ok(x)
}

/// Least-distance program `min ‖x‖₂` subject to `G·x ≥ h`, solved through the
/// NNLS dual. Returns `None` when the constraints are inconsistent.
pub fn least_distance(g_rows: &[Vec<f64>], h: &[f64]) -> Result<Option<Vec<f64>>> {
    let n = g_rows.first().map_or(0, Vec::len);
    let m = g_rows.len();
    if m == 0 {
        return Ok(Some(vec![0.0; n]));
    }
    // E = [Gᵀ; hᵀ], f = e_{n+1}
    let e = DMatrix::from_fn(n + 1, m, |i, j| if i < n { g_rows[j][i] } else { h[j] });
    let mut f = DVector::zeros(n + 1);
    f[n] = 1.0;
    let u = nnls_matrix(&e, &f)?;
    let r = &e * &u - &f;
    let rnorm = r.norm();
    if rnorm <= 1e-12 || r[n].abs() <= 1e-14 {
        return Ok(None);
    }
    Ok(Some((0..n).map(|i| -r[i] / r[n]).collect()))
}
