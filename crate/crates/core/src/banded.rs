//! `L D L'` factorization of symmetric positive-definite pentadiagonal
//! matrices. O(n) to factor, O(n) per solve.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Factor `A = L D L'` with `L` unit lower triangular of bandwidth 2.
#[derive(Debug, Clone, PartialEq)]
pub struct PentaLdl {
    d: Vec<f64>,
    // l1[i] = L(i+1, i), l2[i] = L(i+2, i)
    l1: Vec<f64>,
    l2: Vec<f64>,
}

impl PentaLdl {
    /// `diag`, `off1`, `off2` are the main, first and second upper
    /// diagonals (lengths n, n-1, n-2).
    pub fn factor(diag: &[f64], off1: &[f64], off2: &[f64]) -> Result<Self> {
        let n = diag.len();
        if n < 3 || off1.len() + 1 != n || off2.len() + 2 != n {
            return Err(Error::Dimension {
                expected: n,
                got: off1.len() + 1,
            });
        }
        let mut d = vec![0.0; n];
        let mut l1 = vec![0.0; n - 1];
        let mut l2 = vec![0.0; n - 2];
        for i in 0..n {
            let mut di = diag[i];
            if i >= 1 {
                di -= l1[i - 1] * l1[i - 1] * d[i - 1];
            }
            if i >= 2 {
                di -= l2[i - 2] * l2[i - 2] * d[i - 2];
            }
            if !(di > 0.0) || !di.is_finite() {
                return Err(Error::Numerical(format!(
                    "pivot {i} is {di}; matrix is not positive definite"
                )));
            }
            d[i] = di;
            if i + 1 < n {
                let mut b = off1[i];
                if i >= 1 {
                    b -= l2[i - 1] * l1[i - 1] * d[i - 1];
                }
                l1[i] = b / di;
            }
            if i + 2 < n {
                l2[i] = off2[i] / di;
            }
        }
        Ok(PentaLdl { d, l1, l2 })
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// Overwrites `rhs` with `A⁻¹ rhs`.
    pub fn solve_in_place(&self, rhs: &mut [f64]) -> Result<()> {
        let n = self.d.len();
        if rhs.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: rhs.len(),
            });
        }
        for i in 1..n {
            let mut z = rhs[i] - self.l1[i - 1] * rhs[i - 1];
            if i >= 2 {
                z -= self.l2[i - 2] * rhs[i - 2];
            }
            rhs[i] = z;
        }
        for (x, d) in rhs.iter_mut().zip(&self.d) {
            *x /= d;
        }
        for i in (0..n - 1).rev() {
            let mut x = rhs[i] - self.l1[i] * rhs[i + 1];
            if i + 2 < n {
                x -= self.l2[i] * rhs[i + 2];
            }
            rhs[i] = x;
        }
        Ok(())
    }
}
