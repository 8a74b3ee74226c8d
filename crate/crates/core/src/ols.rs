//! Least squares by Householder QR with a rank check.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Column is treated as dependent when its remaining norm after
/// orthogonalization is below this fraction of its original norm.
const RANK_TOL: f64 = 1e-10;

/// Solves `min ‖X b - y‖` for row-major `x` (`rows × cols`). A column
/// that is (numerically) a combination of earlier ones is an error.
pub(crate) fn least_squares(x: &[f64], rows: usize, cols: usize, y: &[f64]) -> Result<Vec<f64>> {
    qr_solve(x, rows, cols, y, false)
}

/// Least-squares fitted values `X b̂`. Dependent columns are dropped (their
/// coefficient is set to zero); the fitted values do not depend on which
/// basic solution is used.
pub(crate) fn fitted_values(x: &[f64], rows: usize, cols: usize, y: &[f64]) -> Result<Vec<f64>> {
    let b = qr_solve(x, rows, cols, y, true)?;
    Ok((0..rows)
        .map(|i| (0..cols).map(|j| x[i * cols + j] * b[j]).sum())
        .collect())
}

fn qr_solve(
    x: &[f64],
    rows: usize,
    cols: usize,
    y: &[f64],
    drop_dependent: bool,
) -> Result<Vec<f64>> {
    debug_assert_eq!(x.len(), rows * cols);
    debug_assert_eq!(y.len(), rows);
    if rows < cols {
        return Err(Error::SampleSize {
            got: rows,
            min: cols,
        });
    }
    let mut a = x.to_vec();
    let mut rhs = y.to_vec();
    let at = |i: usize, j: usize| i * cols + j;
    let col_norms: Vec<f64> = (0..cols)
        .map(|j| libm::sqrt((0..rows).map(|i| a[at(i, j)] * a[at(i, j)]).sum()))
        .collect();
    // (row of R, column) for each accepted column
    let mut pivots: Vec<(usize, usize)> = Vec::with_capacity(cols);
    let mut diag = vec![0.0; cols];
    let mut r = 0;
    for k in 0..cols {
        let norm = libm::sqrt((r..rows).map(|i| a[at(i, k)] * a[at(i, k)]).sum());
        if norm <= RANK_TOL * col_norms[k] || norm == 0.0 {
            if drop_dependent {
                continue;
            }
            return Err(Error::SingularDesign { column: k });
        }
        let alpha = if a[at(r, k)] > 0.0 { -norm } else { norm };
        // v = x - alpha e_r, stored in place of column k
        a[at(r, k)] -= alpha;
        let vtv: f64 = (r..rows).map(|i| a[at(i, k)] * a[at(i, k)]).sum();
        for j in k + 1..cols {
            let dot: f64 = (r..rows).map(|i| a[at(i, k)] * a[at(i, j)]).sum();
            let scale = 2.0 * dot / vtv;
            for i in r..rows {
                a[at(i, j)] -= scale * a[at(i, k)];
            }
        }
        let dot: f64 = (r..rows).map(|i| a[at(i, k)] * rhs[i]).sum();
        let scale = 2.0 * dot / vtv;
        for i in r..rows {
            rhs[i] -= scale * a[at(i, k)];
        }
        diag[k] = alpha;
        pivots.push((r, k));
        r += 1;
    }
    let mut b = vec![0.0; cols];
    for (idx, &(row, k)) in pivots.iter().enumerate().rev() {
        let mut s = rhs[row];
        for &(_, j) in &pivots[idx + 1..] {
            s -= a[at(row, j)] * b[j];
        }
        b[k] = s / diag[k];
    }
    Ok(b)
}
