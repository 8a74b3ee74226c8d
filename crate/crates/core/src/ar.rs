//! Autoregressive comparison filter.
//!
//! The trend at `s` is the OLS fitted value of `y[s]` from an intercept and
//! `p` lags ending `h` periods earlier; the cycle is the regression
//! residual. `h = 1` is the one-step autoregression, larger `h` the
//! `h`-step projection (`h = 8` with `p = 4` for quarterly data is the
//! usual regression-filter setup).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_finite, Error, Result};
use crate::ols::{fitted_values, least_squares};
use crate::series::{FilterResult, Frequency, MethodId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArMode {
    OneStep,
    Projection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArSpec {
    pub p: usize,
    pub horizon: usize,
    pub mode: ArMode,
}

impl ArSpec {
    pub fn one_step(p: usize) -> Self {
        ArSpec {
            p,
            horizon: 1,
            mode: ArMode::OneStep,
        }
    }

    pub fn projection(p: usize, horizon: usize) -> Self {
        ArSpec {
            p,
            horizon,
            mode: ArMode::Projection,
        }
    }

    /// One-step AR(4) for quarterly data, AR(12) for monthly.
    pub fn for_frequency(frequency: Frequency) -> Result<Self> {
        frequency
            .default_ar_lags()
            .map(Self::one_step)
            .ok_or_else(|| Error::Parameter(format!("no default AR order for {frequency} data")))
    }

    fn effective_horizon(&self) -> usize {
        match self.mode {
            ArMode::OneStep => 1,
            ArMode::Projection => self.horizon,
        }
    }

    /// Index of the first observation that gets a fitted value.
    pub fn first_fitted(&self) -> usize {
        self.p + self.effective_horizon() - 1
    }

    fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::Parameter("AR order must be at least 1".into()));
        }
        if self.mode == ArMode::Projection && self.horizon == 0 {
            return Err(Error::Parameter(
                "projection horizon must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Intercept and lag coefficients; `slopes[j]` multiplies `y[s - h - j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArCoefficients {
    pub intercept: f64,
    pub slopes: Vec<f64>,
    pub spec: ArSpec,
}

impl ArCoefficients {
    /// Fitted value for observation `s` (needs `s ≥ first_fitted`).
    pub fn predict(&self, y: &[f64], s: usize) -> f64 {
        let h = self.spec.effective_horizon();
        self.slopes
            .iter()
            .enumerate()
            .fold(self.intercept, |acc, (j, b)| acc + b * y[s - h - j])
    }
}

struct Design {
    x: Vec<f64>,
    rows: usize,
    cols: usize,
    first: usize,
}

fn design(y: &[f64], spec: &ArSpec) -> Result<Design> {
    spec.validate()?;
    check_finite(y)?;
    let first = spec.first_fitted();
    let rows = y.len().saturating_sub(first);
    let min = spec.p + 2;
    if rows < min {
        return Err(Error::SampleSize { got: rows, min });
    }
    let cols = spec.p + 1;
    let h = spec.effective_horizon();
    let mut x = vec![0.0; rows * cols];
    for (r, s) in (first..y.len()).enumerate() {
        x[r * cols] = 1.0;
        for j in 0..spec.p {
            x[r * cols + 1 + j] = y[s - h - j];
        }
    }
    Ok(Design {
        x,
        rows,
        cols,
        first,
    })
}

/// OLS fit of the autoregression. A rank-deficient design is an error.
pub fn ar_fit(y: &[f64], spec: &ArSpec) -> Result<ArCoefficients> {
    let d = design(y, spec)?;
    let b = least_squares(&d.x, d.rows, d.cols, &y[d.first..])?;
    Ok(ArCoefficients {
        intercept: b[0],
        slopes: b[1..].to_vec(),
        spec: *spec,
    })
}

/// Fitted values as trend, residuals as cycle. Positions before
/// [`ArSpec::first_fitted`] are undefined (`NaN`).
///
/// Fitted values are unique even when the lags are collinear (e.g. affine
/// input), so a rank-deficient design is fitted with the dependent lags
/// dropped instead of failing.
pub fn ar_trend_cycle(y: &[f64], spec: &ArSpec) -> Result<FilterResult> {
    let d = design(y, spec)?;
    let fitted = fitted_values(&d.x, d.rows, d.cols, &y[d.first..])?;
    let mut trend = vec![f64::NAN; y.len()];
    let mut cycle = vec![f64::NAN; y.len()];
    for (s, f) in (d.first..y.len()).zip(fitted) {
        trend[s] = f;
        cycle[s] = y[s] - f;
    }
    Ok(FilterResult {
        trend,
        cycle,
        method: MethodId::Ar,
        iterations: 0,
        ic_path: None,
        lambda: None,
        first_defined: d.first,
        warning: None,
    })
}
