//! Trend accuracy metric and per-replication method evaluation used by the
//! Monte-Carlo harness.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::ar::{ar_trend_cycle, ArSpec};
use crate::boosting::{boosted_hp_bic_with, boosted_hp_with, BoostConfig, Stopping};
use crate::error::{Error, Result};
use crate::hp::{hp_smooth_with, HpSmoother};
use crate::spectrum::PenaltySpectrum;

/// Observations trimmed from each end of the evaluation window.
pub const TRIM_START: usize = 4;
pub const TRIM_END: usize = 4;

/// `(n-8)⁻¹ Σ_{t=5}^{n-4} (f̂_t - f_t)²`. Every estimate in the window must
/// be defined.
pub fn trend_mse(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    let (mse, used) = trend_mse_defined(estimate, truth)?;
    let expected = estimate.len() - TRIM_START - TRIM_END;
    if used != expected {
        return Err(Error::Parameter(format!(
            "{} undefined estimates inside the evaluation window",
            expected - used
        )));
    }
    Ok(mse)
}

/// Like [`trend_mse`] but skips undefined (`NaN`) estimates inside the
/// window and divides by the number of terms actually used, which is also
/// returned.
pub fn trend_mse_defined(estimate: &[f64], truth: &[f64]) -> Result<(f64, usize)> {
    let n = estimate.len();
    if truth.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: truth.len(),
        });
    }
    if n < TRIM_START + TRIM_END + 1 {
        return Err(Error::Window(n));
    }
    let mut sum = 0.0;
    let mut used = 0;
    for t in TRIM_START..n - TRIM_END {
        if estimate[t].is_nan() {
            continue;
        }
        let d = estimate[t] - truth[t];
        sum += d * d;
        used += 1;
    }
    if used == 0 {
        return Err(Error::Parameter(
            "no defined estimates inside the evaluation window".into(),
        ));
    }
    Ok((sum / used as f64, used))
}

/// A trend estimator compared in the simulations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodSpec {
    Hp,
    /// Boosted HP with two iterations.
    TwoHp,
    BhpBic {
        m_max: usize,
    },
    BhpFixed(usize),
    Ar(ArSpec),
    /// Returns the true trend; a harness self-check.
    Oracle,
}

impl MethodSpec {
    pub fn label(&self) -> String {
        match self {
            MethodSpec::Hp => "HP".into(),
            MethodSpec::TwoHp => "2HP".into(),
            MethodSpec::BhpBic { .. } => "bHP".into(),
            MethodSpec::BhpFixed(m) => format!("bHP{m}"),
            MethodSpec::Ar(spec) => match spec.mode {
                crate::ar::ArMode::OneStep => "AR".into(),
                crate::ar::ArMode::Projection => format!("AR-h{}", spec.horizon),
            },
            MethodSpec::Oracle => "oracle".into(),
        }
    }

    pub fn needs_spectrum(&self) -> bool {
        matches!(self, MethodSpec::BhpBic { .. })
    }
}

/// Prebuilt operators shared by every replication of one `(n, λ)`.
#[derive(Debug, Clone, Copy)]
pub struct FilterContext<'a> {
    pub smoother: &'a HpSmoother,
    pub spectrum: Option<&'a PenaltySpectrum>,
}

/// Trend estimate of `method` for `y` (`NaN` where undefined).
pub fn estimate_trend(
    method: &MethodSpec,
    y: &[f64],
    truth: &[f64],
    ctx: FilterContext<'_>,
) -> Result<Vec<f64>> {
    let lambda = ctx.smoother.lambda();
    let result = match method {
        MethodSpec::Hp => hp_smooth_with(y, ctx.smoother)?,
        MethodSpec::TwoHp => boosted_hp_with(y, ctx.smoother, 2)?,
        MethodSpec::BhpFixed(m) => boosted_hp_with(y, ctx.smoother, *m)?,
        MethodSpec::BhpBic { m_max } => {
            let spectrum = ctx.spectrum.ok_or_else(|| {
                Error::Parameter("BIC stopping needs the penalty spectrum".into())
            })?;
            let config = BoostConfig::custom(lambda)
                .with_m_max(*m_max)
                .with_stopping(Stopping::Bic);
            boosted_hp_bic_with(y, &config, ctx.smoother, spectrum)?
        }
        MethodSpec::Ar(spec) => ar_trend_cycle(y, spec)?,
        MethodSpec::Oracle => return Ok(truth.to_vec()),
    };
    Ok(result.trend)
}

/// Trimmed trend MSE of `method` on one draw, skipping undefined estimates.
pub fn evaluate_method(
    method: &MethodSpec,
    y: &[f64],
    truth: &[f64],
    ctx: FilterContext<'_>,
) -> Result<f64> {
    let trend = estimate_trend(method, y, truth, ctx)?;
    Ok(trend_mse_defined(&trend, truth)?.0)
}

/// Mean and Monte-Carlo standard error of a sample, summed in index order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std_error: f64,
    pub count: usize,
}

pub fn summarize(values: &[f64]) -> Summary {
    let count = values.len();
    if count == 0 {
        return Summary {
            mean: f64::NAN,
            std_error: f64::NAN,
            count,
        };
    }
    let mean = values.iter().sum::<f64>() / count as f64;
    let std_error = if count > 1 {
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        libm::sqrt(ss / (count - 1) as f64 / count as f64)
    } else {
        f64::NAN
    };
    Summary {
        mean,
        std_error,
        count,
    }
}
