//! Shared vocabulary: sampling frequency and the result of a filter run.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use crate::boosting::IcPath;
use crate::error::Error;

/// Sampling frequency of a series. Drives the conventional defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Frequency {
    Quarterly,
    Monthly,
    Annual,
    Custom,
}

impl Frequency {
    /// Conventional smoothing parameter: 1600 quarterly, 129600 monthly,
    /// 6.25 annual. `Custom` has no default.
    pub fn default_lambda(self) -> Option<f64> {
        match self {
            Frequency::Quarterly => Some(1600.0),
            Frequency::Monthly => Some(129_600.0),
            Frequency::Annual => Some(6.25),
            Frequency::Custom => None,
        }
    }

    /// AR lag order of the comparison filter: 4 quarterly, 12 monthly.
    pub fn default_ar_lags(self) -> Option<usize> {
        match self {
            Frequency::Quarterly => Some(4),
            Frequency::Monthly => Some(12),
            _ => None,
        }
    }

    /// Number of autocorrelations tested jointly (one and a half years).
    pub fn default_ac_lags(self) -> Option<usize> {
        match self {
            Frequency::Quarterly => Some(6),
            Frequency::Monthly => Some(18),
            _ => None,
        }
    }

    /// Angular frequency of the simulated five-year business cycle.
    pub fn cycle_phi(self) -> Option<f64> {
        match self {
            Frequency::Quarterly => Some(PI / 10.0),
            Frequency::Monthly => Some(PI / 30.0),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Frequency::Quarterly => "quarterly",
            Frequency::Monthly => "monthly",
            Frequency::Annual => "annual",
            Frequency::Custom => "custom",
        }
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Frequency {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "quarterly" | "q" => Ok(Frequency::Quarterly),
            "monthly" | "m" => Ok(Frequency::Monthly),
            "annual" | "a" | "yearly" => Ok(Frequency::Annual),
            "custom" => Ok(Frequency::Custom),
            other => Err(Error::Parameter(alloc::format!(
                "unknown frequency '{other}'"
            ))),
        }
    }
}

/// Which filter produced a [`FilterResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodId {
    Hp,
    /// Boosted HP with a fixed number of iterations.
    Boosted,
    /// Boosted HP stopped by the information criterion.
    BoostedBic,
    Ar,
}

impl MethodId {
    pub fn as_str(self) -> &'static str {
        match self {
            MethodId::Hp => "HP",
            MethodId::Boosted => "bHP",
            MethodId::BoostedBic => "bHP-BIC",
            MethodId::Ar => "AR",
        }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Warnings that do not invalidate a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterWarning {
    /// The stopping rule selected the last admissible iteration.
    StoppingNotInterior,
}

impl FilterWarning {
    pub fn as_str(self) -> &'static str {
        match self {
            FilterWarning::StoppingNotInterior => "stopping not interior",
        }
    }
}

/// Trend/cycle decomposition of one series.
///
/// Positions before `first_defined` have no estimate (only the AR filter
/// produces such positions); they hold `NaN` in both vectors and must be
/// skipped by any consumer. Use [`FilterResult::defined_trend`] and
/// [`FilterResult::defined_cycle`] to get the defined part.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterResult {
    pub trend: Vec<f64>,
    pub cycle: Vec<f64>,
    pub method: MethodId,
    /// Number of smoother iterations (1 for HP, `m̂` for the stopped filter,
    /// 0 for AR).
    pub iterations: usize,
    pub ic_path: Option<IcPath>,
    pub lambda: Option<f64>,
    pub first_defined: usize,
    pub warning: Option<FilterWarning>,
}

impl FilterResult {
    pub fn len(&self) -> usize {
        self.trend.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trend.is_empty()
    }

    pub fn is_defined(&self, t: usize) -> bool {
        t >= self.first_defined && t < self.trend.len()
    }

    pub fn defined_trend(&self) -> &[f64] {
        &self.trend[self.first_defined..]
    }

    pub fn defined_cycle(&self) -> &[f64] {
        &self.cycle[self.first_defined..]
    }
}
