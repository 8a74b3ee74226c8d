//! The Hodrick-Prescott smoother `S = (I + λ D D')⁻¹`.

use alloc::format;
use alloc::vec::Vec;

use crate::banded::PentaLdl;
use crate::error::{check_finite, Error, Result};
use crate::penalty::{build_penalty_operator, MIN_LEN};
use crate::series::{FilterResult, MethodId};

/// `S` for one `(n, λ)`, with its banded factorization computed once.
///
/// `λ = 0` gives the identity smoother.
#[derive(Debug, Clone)]
pub struct HpSmoother {
    n: usize,
    lambda: f64,
    factor: Option<PentaLdl>,
}

impl HpSmoother {
    pub fn new(n: usize, lambda: f64) -> Result<Self> {
        if n < MIN_LEN {
            return Err(Error::InvalidLength {
                got: n,
                min: MIN_LEN,
            });
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::Parameter(format!(
                "lambda must be finite and nonnegative, got {lambda}"
            )));
        }
        if lambda == 0.0 {
            return Ok(HpSmoother {
                n,
                lambda,
                factor: None,
            });
        }
        let p = build_penalty_operator(n)?;
        let diag: Vec<f64> = p.diag.iter().map(|&v| 1.0 + lambda * v).collect();
        let off1: Vec<f64> = p.off1.iter().map(|&v| lambda * v).collect();
        let off2: Vec<f64> = p.off2.iter().map(|&v| lambda * v).collect();
        let factor = PentaLdl::factor(&diag, &off1, &off2)?;
        Ok(HpSmoother {
            n,
            lambda,
            factor: Some(factor),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `S v`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = v.to_vec();
        self.apply_in_place(&mut out)?;
        Ok(out)
    }

    /// Overwrites `v` with `S v`.
    ///
    /// The least-squares line through `v` is passed through untouched (it
    /// lies in the penalty's null space) and only the remainder is solved
    /// for, so affine inputs come back exactly and large `λ` stays accurate.
    pub fn apply_in_place(&self, v: &mut [f64]) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: v.len(),
            });
        }
        let Some(factor) = &self.factor else {
            return Ok(());
        };
        let (a, b) = affine_fit(v);
        let centre = (self.n as f64 + 1.0) / 2.0;
        let line = |t: usize| a + b * ((t + 1) as f64 - centre);
        for (t, x) in v.iter_mut().enumerate() {
            *x -= line(t);
        }
        factor.solve_in_place(v)?;
        for (t, x) in v.iter_mut().enumerate() {
            *x += line(t);
        }
        Ok(())
    }

    /// `(I - S) v`.
    pub fn residual(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut smooth = self.apply(v)?;
        for (s, &x) in smooth.iter_mut().zip(v) {
            *s = x - *s;
        }
        Ok(smooth)
    }
}

/// Least-squares line `a + b (t - t̄)` through `v` indexed `t = 1..=n`.
fn affine_fit(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let centre = (n + 1.0) / 2.0;
    let mean = v.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (t, &x) in v.iter().enumerate() {
        let dt = (t + 1) as f64 - centre;
        sxy += dt * (x - mean);
        sxx += dt * dt;
    }
    (mean, sxy / sxx)
}

pub(crate) fn validate_series(y: &[f64]) -> Result<()> {
    if y.len() < MIN_LEN {
        return Err(Error::InvalidLength {
            got: y.len(),
            min: MIN_LEN,
        });
    }
    check_finite(y)
}

/// HP decomposition of `y`: trend solves `(I + λ D D') f = y`, cycle is
/// `y - f`.
pub fn hp_smooth(y: &[f64], lambda: f64) -> Result<FilterResult> {
    validate_series(y)?;
    let smoother = HpSmoother::new(y.len(), lambda)?;
    hp_smooth_with(y, &smoother)
}

/// [`hp_smooth`] with a prebuilt smoother.
pub fn hp_smooth_with(y: &[f64], smoother: &HpSmoother) -> Result<FilterResult> {
    validate_series(y)?;
    let trend = smoother.apply(y)?;
    let cycle = y.iter().zip(&trend).map(|(a, b)| a - b).collect();
    Ok(FilterResult {
        trend,
        cycle,
        method: MethodId::Hp,
        iterations: 1,
        ic_path: None,
        lambda: Some(smoother.lambda()),
        first_defined: 0,
        warning: None,
    })
}
