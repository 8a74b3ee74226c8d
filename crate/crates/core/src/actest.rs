//! Heteroskedasticity-robust test of zero autocorrelation.
//!
//! For lag `k` the robust t-ratio is
//!
//! ```text
//! t̃_k = Σ_{t>k} e_t e_{t-k} / √(Σ_{t>k} e_t² e_{t-k}²),   e_t = z_t - z̄
//! ```
//!
//! and the joint statistic for `ρ₁ = … = ρ_K = 0` is `Q̃_K = Σ t̃_k²`,
//! compared with the 95% quantile of chi-square(K). This joint statistic
//! ignores cross-correlation among the `t̃_k`; outputs label it as the
//! simplified form.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{check_finite, Error, Result};
use crate::special::chi_square_quantile;

/// Name reported alongside the joint statistic.
pub const JOINT_STATISTIC: &str = "sum of squared robust t-ratios (no cross-lag correction)";

#[derive(Debug, Clone, PartialEq)]
pub struct AcTestResult {
    pub lags: usize,
    pub t_stats: Vec<f64>,
    pub joint_stat: f64,
    pub critical_value_5pct: f64,
    pub reject: bool,
}

pub fn robust_ac_test(z: &[f64], lags: usize) -> Result<AcTestResult> {
    if lags == 0 {
        return Err(Error::Parameter("number of lags must be at least 1".into()));
    }
    check_finite(z)?;
    let n = z.len();
    if n < lags + 2 {
        return Err(Error::SampleSize {
            got: n,
            min: lags + 2,
        });
    }
    let mean = z.iter().sum::<f64>() / n as f64;
    let e: Vec<f64> = z.iter().map(|v| v - mean).collect();
    let scale = e.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if scale == 0.0 || scale <= 1e-14 * mean.abs() {
        return Err(Error::ZeroVariance);
    }
    let mut t_stats = Vec::with_capacity(lags);
    for k in 1..=lags {
        let mut num = 0.0;
        let mut den = 0.0;
        for t in k..n {
            let p = e[t] * e[t - k];
            num += p;
            den += p * p;
        }
        if !(den > 0.0) {
            return Err(Error::Degenerate(format!(
                "zero robust variance at lag {k}"
            )));
        }
        t_stats.push(num / libm::sqrt(den));
    }
    let joint_stat: f64 = t_stats.iter().map(|t| t * t).sum();
    let critical_value_5pct = chi_square_quantile(0.95, lags as f64)?;
    Ok(AcTestResult {
        lags,
        t_stats,
        joint_stat,
        critical_value_5pct,
        reject: joint_stat > critical_value_5pct,
    })
}
