//! Spectrum of the penalty `D D'` and the smoother traces built from it.
//!
//! `D D'` (n × n) and `D' D` ((n-2) × (n-2)) share their nonzero
//! eigenvalues, and `D D'` has exactly two more, both zero (constants and
//! linear trends). `D' D` is the nonsingular Toeplitz matrix with stencil
//! `(1, -4, 6, -4, 1)`, so its eigenvalues are computed directly and the two
//! structural zeros are prepended exactly rather than classified by a
//! tolerance, which breaks down for long series (`μ₃ < 1e-9` at n = 900).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::eigen::symmetric_eigenvalues;
use crate::error::{Error, Result};
use crate::penalty::MIN_LEN;

/// Eigenvalues `μ₁ ≤ … ≤ μₙ` of `D D'`; `μ₁ = μ₂ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltySpectrum {
    n: usize,
    eigenvalues: Vec<f64>,
}

impl PenaltySpectrum {
    pub fn new(n: usize) -> Result<Self> {
        if n < MIN_LEN {
            return Err(Error::InvalidLength {
                got: n,
                min: MIN_LEN,
            });
        }
        let k = n - 2;
        let mut a = vec![0.0; k * k];
        let stencil = [6.0, -4.0, 1.0];
        for i in 0..k {
            for (off, &v) in stencil.iter().enumerate() {
                if i + off < k {
                    a[i * k + i + off] = v;
                    a[(i + off) * k + i] = v;
                }
            }
        }
        let nonzero = symmetric_eigenvalues(&mut a, k)?;
        if let Some(&smallest) = nonzero.first() {
            if !(smallest > 0.0) {
                return Err(Error::Numerical(format!(
                    "smallest eigenvalue of D'D is {smallest:e} for n = {n}; expected a positive value"
                )));
            }
        }
        let mut eigenvalues = Vec::with_capacity(n);
        eigenvalues.extend_from_slice(&[0.0, 0.0]);
        eigenvalues.extend(nonzero);
        Ok(PenaltySpectrum { n, eigenvalues })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Smallest nonzero eigenvalue `μ₃`.
    pub fn smallest_nonzero(&self) -> f64 {
        self.eigenvalues[2]
    }

    pub fn largest(&self) -> f64 {
        self.eigenvalues[self.n - 1]
    }

    /// `tr(S) = Σ 1/(1 + λ μᵢ)`.
    pub fn trace_smoother(&self, lambda: f64) -> f64 {
        self.eigenvalues
            .iter()
            .map(|&mu| 1.0 / (1.0 + lambda * mu))
            .sum()
    }

    /// `tr(I - S) = Σ λμᵢ/(1 + λμᵢ)`.
    pub fn trace_residual(&self, lambda: f64) -> f64 {
        self.eigenvalues.iter().map(|&mu| shrink(lambda, mu)).sum()
    }

    /// Largest eigenvalue of `I - S`, the per-iteration contraction of the
    /// boosted residual: `λμₙ/(1 + λμₙ)`.
    pub fn residual_contraction(&self, lambda: f64) -> f64 {
        shrink(lambda, self.largest())
    }
}

#[inline]
fn shrink(lambda: f64, mu: f64) -> f64 {
    let x = lambda * mu;
    x / (1.0 + x)
}

/// Traces used by the stopping criterion at iteration `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmootherTrace {
    pub m: usize,
    /// `tr(B_m) = tr(I - (I - S)^m)`.
    pub tr_boosted: f64,
    /// `tr(I - S)`.
    pub tr_residual: f64,
}

/// `(tr(B_m), tr(I - S))` for `m = 1..=m_max`, O(n) per `m`.
///
/// `tr(B_m) = Σ [1 - (λμᵢ/(1 + λμᵢ))^m]` increases with `m` towards `n`;
/// the two null-space directions contribute 1 for every `m`.
pub fn smoother_traces(
    spectrum: &PenaltySpectrum,
    lambda: f64,
    m_max: usize,
) -> Result<Vec<SmootherTrace>> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Parameter(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    if m_max == 0 {
        return Err(Error::Parameter("m_max must be at least 1".into()));
    }
    let ratios: Vec<f64> = spectrum
        .eigenvalues
        .iter()
        .map(|&mu| shrink(lambda, mu))
        .collect();
    let tr_residual: f64 = ratios.iter().sum();
    let mut powers = ratios.clone();
    let n = spectrum.n as f64;
    let mut out = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let tr_boosted = n - powers.iter().sum::<f64>();
        out.push(SmootherTrace {
            m,
            tr_boosted,
            tr_residual,
        });
        for (p, r) in powers.iter_mut().zip(&ratios) {
            *p *= r;
        }
    }
    Ok(out)
}
