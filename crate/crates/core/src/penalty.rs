//! The HP roughness penalty `D D'`, where `D'` is the `(n-2) × n`
//! second-difference map with stencil `(1, -2, 1)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Shortest series the filters accept: three second differences.
pub const MIN_LEN: usize = 5;

const STENCIL: [f64; 3] = [1.0, -2.0, 1.0];

/// Symmetric pentadiagonal storage of `D D'`.
///
/// `diag[i]` is entry `(i, i)`, `off1[i]` is `(i, i+1)` and `off2[i]` is
/// `(i, i+2)`. All entries are small integers.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyOperator {
    n: usize,
    pub(crate) diag: Vec<f64>,
    pub(crate) off1: Vec<f64>,
    pub(crate) off2: Vec<f64>,
}

/// Builds `D D'` for a series of length `n`.
pub fn build_penalty_operator(n: usize) -> Result<PenaltyOperator> {
    if n < MIN_LEN {
        return Err(Error::InvalidLength {
            got: n,
            min: MIN_LEN,
        });
    }
    let mut diag = vec![0.0; n];
    let mut off1 = vec![0.0; n - 1];
    let mut off2 = vec![0.0; n - 2];
    // Each second difference k touches positions k, k+1, k+2.
    for k in 0..n - 2 {
        for a in 0..3 {
            let i = k + a;
            diag[i] += STENCIL[a] * STENCIL[a];
            if a + 1 < 3 {
                off1[i] += STENCIL[a] * STENCIL[a + 1];
            }
            if a + 2 < 3 {
                off2[i] += STENCIL[a] * STENCIL[a + 2];
            }
        }
    }
    Ok(PenaltyOperator {
        n,
        diag,
        off1,
        off2,
    })
}

impl PenaltyOperator {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Entry `(i, j)`, zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        match hi - lo {
            0 => self.diag[lo],
            1 => self.off1[lo],
            2 => self.off2[lo],
            _ => 0.0,
        }
    }

    /// Dense row `i` (0-based).
    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.n).map(|j| self.get(i, j)).collect()
    }

    /// `D D' v`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: v.len(),
            });
        }
        let n = self.n;
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diag[i] * v[i];
            if i + 1 < n {
                acc += self.off1[i] * v[i + 1];
            }
            if i + 2 < n {
                acc += self.off2[i] * v[i + 2];
            }
            if i >= 1 {
                acc += self.off1[i - 1] * v[i - 1];
            }
            if i >= 2 {
                acc += self.off2[i - 2] * v[i - 2];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// `trace(D D')`, equal to the sum of squared entries of `D'`.
    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }
}

/// `D' y`: the `n - 2` second differences `y[t] - 2 y[t+1] + y[t+2]`.
pub fn second_differences(y: &[f64]) -> Vec<f64> {
    y.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).collect()
}
