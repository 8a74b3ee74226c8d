//! Numerical checks of how the HP residual operator `I - S` acts on
//! trigonometric, exponential and polynomial sequences when `λ = μ n⁴`.
//!
//! The limiting operator multiplies `sin(r/√λ_k)` and `cos(r/√λ_k)` by
//! `μ/(μ + λ_k²)` per application, an exponential `e^{cr}` by
//! `μc⁴/(μc⁴ + 1)`, and annihilates polynomials of degree below `4m`
//! after `m` applications. The finite-sample operator only does so away
//! from the ends of the sample, so every comparison here is restricted to
//! an interior window. Constants and linear trends are annihilated exactly
//! everywhere.

use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::hp::HpSmoother;

pub const DEFAULT_INTERIOR: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Sine,
    Cosine,
}

/// `λ_k = 1/((k - ½)π)²`.
pub fn kl_eigenvalue(k: usize) -> f64 {
    let w = (k as f64 - 0.5) * PI;
    1.0 / (w * w)
}

/// Karhunen-Loève basis function `√2 sin(r/√λ_k)` or `√2 cos(r/√λ_k)`
/// sampled at `r = t/n`, `t = 1..=n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlBasis {
    pub k: usize,
    pub n: usize,
    pub kind: BasisKind,
}

impl KlBasis {
    pub fn lambda_k(&self) -> f64 {
        kl_eigenvalue(self.k)
    }

    pub fn sample(&self) -> Vec<f64> {
        let freq = 1.0 / libm::sqrt(self.lambda_k());
        (1..=self.n)
            .map(|t| {
                let x = freq * t as f64 / self.n as f64;
                SQRT_2
                    * match self.kind {
                        BasisKind::Sine => libm::sin(x),
                        BasisKind::Cosine => libm::cos(x),
                    }
            })
            .collect()
    }
}

/// `(μ/(μ + λ_k²))^m`.
pub fn shrinkage_factor(mu: f64, k: usize, m: usize) -> f64 {
    let lk = kl_eigenvalue(k);
    libm::pow(mu / (mu + lk * lk), m as f64)
}

/// Largest basis index inside the admissible range `k ≤ ⌊√(log n)/π⌋`.
pub fn admissible_k(n: usize) -> usize {
    (libm::sqrt(libm::log(n as f64)) / PI) as usize
}

/// Outcome of one interior comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShrinkageCheck {
    pub k: usize,
    pub n: usize,
    pub mu: f64,
    pub m: usize,
    pub predicted_factor: f64,
    pub empirical_sup_error: f64,
    pub interior_fraction: f64,
    /// `k` exceeds [`admissible_k`]; the check still runs.
    pub outside_admissible_range: bool,
}

/// Half-open index range of the middle `fraction` of `0..n`.
pub fn interior_range(n: usize, fraction: f64) -> (usize, usize) {
    let drop = libm::floor(n as f64 * (1.0 - fraction) / 2.0) as usize;
    (drop, n - drop)
}

/// `(I - S)^m v`.
pub fn residual_power(smoother: &HpSmoother, v: &[f64], m: usize) -> Result<Vec<f64>> {
    let mut out = v.to_vec();
    for _ in 0..m {
        out = smoother.residual(&out)?;
    }
    Ok(out)
}

fn check_fraction(fraction: f64) -> Result<()> {
    if fraction > 0.0 && fraction <= 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(alloc::format!(
            "interior fraction must be in (0, 1], got {fraction}"
        )))
    }
}

fn interior_sup(v: &[f64], fraction: f64) -> f64 {
    let (lo, hi) = interior_range(v.len(), fraction);
    v[lo..hi].iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Applies `(I - S)^m` with `λ = μ n⁴` to the sampled basis vector and
/// reports `sup |result - factor · basis|` over the interior.
pub fn empirical_shrinkage_error(
    k: usize,
    n: usize,
    mu: f64,
    m: usize,
    kind: BasisKind,
    interior_fraction: f64,
) -> Result<ShrinkageCheck> {
    check_fraction(interior_fraction)?;
    if k == 0 || m == 0 || !(mu > 0.0) {
        return Err(Error::Parameter("need k >= 1, m >= 1 and mu > 0".into()));
    }
    let lambda = mu * libm::pow(n as f64, 4.0);
    let smoother = HpSmoother::new(n, lambda)?;
    let basis = KlBasis { k, n, kind }.sample();
    let factor = shrinkage_factor(mu, k, m);
    let result = residual_power(&smoother, &basis, m)?;
    let diff: Vec<f64> = result
        .iter()
        .zip(&basis)
        .map(|(r, b)| r - factor * b)
        .collect();
    Ok(ShrinkageCheck {
        k,
        n,
        mu,
        m,
        predicted_factor: factor,
        empirical_sup_error: interior_sup(&diff, interior_fraction),
        interior_fraction,
        outside_admissible_range: k > admissible_k(n),
    })
}

/// Applies the `m`-step boosted trend operator `B_m = I - (I - S)^m` with
/// `λ = μ n⁴` to `e^{ct/n}` and reports the interior sup of
/// `|B_m e - g e|` relative to the interior sup of `|g e|`, where
/// `g = 1 - (μc⁴/(μc⁴ + 1))^m`. For `m = 1`, `B_1 = S` and `g = 1/(μc⁴ + 1)`.
pub fn exponential_shrinkage_check(
    c: f64,
    n: usize,
    mu: f64,
    m: usize,
    interior_fraction: f64,
) -> Result<ShrinkageCheck> {
    check_fraction(interior_fraction)?;
    if m == 0 || !(mu > 0.0) || !c.is_finite() {
        return Err(Error::Parameter("need m >= 1, mu > 0 and finite c".into()));
    }
    let lambda = mu * libm::pow(n as f64, 4.0);
    let smoother = HpSmoother::new(n, lambda)?;
    let e: Vec<f64> = (1..=n)
        .map(|t| libm::exp(c * t as f64 / n as f64))
        .collect();
    let c4 = mu * libm::pow(c, 4.0);
    let gain = 1.0 - libm::pow(c4 / (c4 + 1.0), m as f64);
    let residual = residual_power(&smoother, &e, m)?;
    let diff: Vec<f64> = e
        .iter()
        .zip(&residual)
        .map(|(x, r)| (x - r) - gain * x)
        .collect();
    let scale: Vec<f64> = e.iter().map(|x| gain * x).collect();
    Ok(ShrinkageCheck {
        k: 0,
        n,
        mu,
        m,
        predicted_factor: gain,
        empirical_sup_error: interior_sup(&diff, interior_fraction)
            / interior_sup(&scale, interior_fraction),
        interior_fraction,
        outside_admissible_range: c.abs() > 5.0,
    })
}

/// `(I - S)^m (t/n)^d` for `t = 1..=n`.
pub fn polynomial_residual(d: u32, n: usize, lambda: f64, m: usize) -> Result<Vec<f64>> {
    let smoother = HpSmoother::new(n, lambda)?;
    let x: Vec<f64> = (1..=n)
        .map(|t| libm::pow(t as f64 / n as f64, d as f64))
        .collect();
    residual_power(&smoother, &x, m)
}

/// Interior sup of `|(I - S)^m (t/n)^d|` divided by `sup |(t/n)^d|` (= 1).
pub fn polynomial_annihilation_error(
    d: u32,
    n: usize,
    lambda: f64,
    m: usize,
    interior_fraction: f64,
) -> Result<f64> {
    check_fraction(interior_fraction)?;
    let r = polynomial_residual(d, n, lambda, m)?;
    Ok(interior_sup(&r, interior_fraction))
}
