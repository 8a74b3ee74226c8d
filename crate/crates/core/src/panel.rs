//! Panel pipeline: filter every series, standardize the cycles to unit
//! sample variance, flip the sign of counter-cyclical series and average
//! across the panel into an aggregate cyclical index.
//!
//! Series keep their slot in every stage; a series that cannot be used is
//! moved to the `excluded` list with a reason instead of disappearing.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::ar::{ar_trend_cycle, ArSpec};
use crate::boosting::{boosted_hp_bic_with, boosted_hp_with, BoostConfig, Stopping, DEFAULT_M_MAX};
use crate::error::{Error, Result};
use crate::hp::{hp_smooth_with, HpSmoother};
use crate::series::{FilterResult, Frequency};
use crate::spectrum::PenaltySpectrum;

/// A series on the panel's date axis, trimmed to its usable range.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelSeries {
    pub id: u32,
    pub name: String,
    /// Values on the full date axis; `NaN` outside the usable range.
    pub values: Vec<f64>,
    /// Half-open index range `[start, end)` with no missing values.
    pub usable: (usize, usize),
}

impl PanelSeries {
    pub fn usable_values(&self) -> &[f64] {
        &self.values[self.usable.0..self.usable.1]
    }
}

/// Why a series was left out of a later stage.
#[derive(Debug, Clone, PartialEq)]
pub struct Exclusion {
    pub id: u32,
    pub name: String,
    pub reason: String,
}

/// Trims leading/trailing missing values. Interior gaps are linearly
/// interpolated when `interpolate_interior` is set and rejected otherwise.
pub fn prepare_series(
    id: u32,
    name: &str,
    raw: &[Option<f64>],
    interpolate_interior: bool,
) -> core::result::Result<PanelSeries, Exclusion> {
    let exclusion = |reason: String| Exclusion {
        id,
        name: name.to_string(),
        reason,
    };
    let Some(start) = raw.iter().position(|v| v.is_some()) else {
        return Err(exclusion("no observations".into()));
    };
    let end = raw.iter().rposition(|v| v.is_some()).unwrap() + 1;
    let mut values = vec![f64::NAN; raw.len()];
    let mut gaps = 0;
    let mut last_known = start;
    for t in start..end {
        match raw[t] {
            Some(v) if v.is_finite() => {
                if t > last_known + 1 && interpolate_interior {
                    let (a, b) = (values[last_known], v);
                    let span = (t - last_known) as f64;
                    for g in last_known + 1..t {
                        values[g] = a + (b - a) * (g - last_known) as f64 / span;
                    }
                }
                values[t] = v;
                last_known = t;
            }
            Some(_) => return Err(exclusion(format!("non-finite value at row {t}"))),
            None => gaps += 1,
        }
    }
    if gaps > 0 && !interpolate_interior {
        return Err(exclusion(format!("{gaps} interior missing value(s)")));
    }
    Ok(PanelSeries {
        id,
        name: name.to_string(),
        values,
        usable: (start, end),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelDataset {
    pub dates: Vec<String>,
    pub frequency: Frequency,
    pub series: Vec<PanelSeries>,
    pub excluded: Vec<Exclusion>,
}

impl PanelDataset {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    /// Ids must be unique and every series must live on the shared axis.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeMap::new();
        for s in &self.series {
            if seen.insert(s.id, ()).is_some() {
                return Err(Error::Parameter(format!("duplicate series id {}", s.id)));
            }
            if s.values.len() != self.dates.len() {
                return Err(Error::Dimension {
                    expected: self.dates.len(),
                    got: s.values.len(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PanelMethod {
    Hp,
    BhpBic,
    BhpFixed(usize),
    Ar,
}

impl PanelMethod {
    pub fn label(&self) -> String {
        match self {
            PanelMethod::Hp => "HP".into(),
            PanelMethod::BhpBic => "bHP".into(),
            PanelMethod::BhpFixed(2) => "2HP".into(),
            PanelMethod::BhpFixed(m) => format!("bHP{m}"),
            PanelMethod::Ar => "AR".into(),
        }
    }
}

/// Filter settings applied to every series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelFilter {
    pub method: PanelMethod,
    pub lambda: f64,
    pub m_max: usize,
    pub ar: ArSpec,
}

impl PanelFilter {
    /// Conventional `λ` and AR order for the frequency.
    pub fn for_frequency(method: PanelMethod, frequency: Frequency) -> Result<Self> {
        let lambda = frequency.default_lambda().ok_or_else(|| {
            Error::Parameter("custom frequency requires an explicit lambda".into())
        })?;
        let ar = ArSpec::one_step(frequency.default_ar_lags().unwrap_or(4));
        Ok(PanelFilter {
            method,
            lambda,
            m_max: DEFAULT_M_MAX,
            ar,
        })
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_ar(mut self, ar: ArSpec) -> Self {
        self.ar = ar;
        self
    }

    pub fn with_m_max(mut self, m_max: usize) -> Self {
        self.m_max = m_max;
        self
    }
}

/// Caches operators by series length while filtering a panel.
#[derive(Default)]
struct Operators {
    smoothers: BTreeMap<usize, HpSmoother>,
    spectra: BTreeMap<usize, PenaltySpectrum>,
}

impl Operators {
    fn smoother(&mut self, n: usize, lambda: f64) -> Result<&HpSmoother> {
        if !self.smoothers.contains_key(&n) {
            self.smoothers.insert(n, HpSmoother::new(n, lambda)?);
        }
        Ok(&self.smoothers[&n])
    }

    fn spectrum(&mut self, n: usize) -> Result<&PenaltySpectrum> {
        if !self.spectra.contains_key(&n) {
            self.spectra.insert(n, PenaltySpectrum::new(n)?);
        }
        Ok(&self.spectra[&n])
    }
}

/// Filters one series with the panel settings.
pub fn filter_series(y: &[f64], filter: &PanelFilter) -> Result<FilterResult> {
    let mut ops = Operators::default();
    filter_with(y, filter, &mut ops)
}

fn filter_with(y: &[f64], filter: &PanelFilter, ops: &mut Operators) -> Result<FilterResult> {
    let n = y.len();
    match filter.method {
        PanelMethod::Ar => ar_trend_cycle(y, &filter.ar),
        PanelMethod::Hp => {
            crate::hp::validate_series(y)?;
            hp_smooth_with(y, ops.smoother(n, filter.lambda)?)
        }
        PanelMethod::BhpFixed(m) => {
            crate::hp::validate_series(y)?;
            boosted_hp_with(y, ops.smoother(n, filter.lambda)?, m)
        }
        PanelMethod::BhpBic => {
            crate::hp::validate_series(y)?;
            let config = BoostConfig::custom(filter.lambda)
                .with_m_max(filter.m_max)
                .with_stopping(Stopping::Bic);
            ops.spectrum(n)?;
            ops.smoother(n, filter.lambda)?;
            boosted_hp_bic_with(y, &config, &ops.smoothers[&n], &ops.spectra[&n])
        }
    }
}

/// Filtered output of one series over its usable range.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCycle {
    pub id: u32,
    pub name: String,
    /// First index of the usable range on the panel axis.
    pub start: usize,
    pub trend: Vec<f64>,
    /// `NaN` where the filter has no estimate (AR start-up).
    pub cycle: Vec<f64>,
    /// Iterations chosen by the stopping rule (boosted filters only).
    pub iterations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelCycles {
    pub axis_len: usize,
    pub method: String,
    pub series: Vec<SeriesCycle>,
    pub excluded: Vec<Exclusion>,
}

/// Filters every usable series. Failures exclude the series with the error
/// as reason.
pub fn filter_panel(panel: &PanelDataset, filter: &PanelFilter) -> Result<PanelCycles> {
    panel.validate()?;
    let mut ops = Operators::default();
    let mut series = Vec::with_capacity(panel.series.len());
    let mut excluded = panel.excluded.clone();
    for s in &panel.series {
        match filter_with(s.usable_values(), filter, &mut ops) {
            Ok(r) => series.push(SeriesCycle {
                id: s.id,
                name: s.name.clone(),
                start: s.usable.0,
                iterations: matches!(
                    filter.method,
                    PanelMethod::BhpBic | PanelMethod::BhpFixed(_)
                )
                .then_some(r.iterations),
                trend: r.trend,
                cycle: r.cycle,
            }),
            Err(e) => excluded.push(Exclusion {
                id: s.id,
                name: s.name.clone(),
                reason: format!("filter failed: {e}"),
            }),
        }
    }
    Ok(PanelCycles {
        axis_len: panel.len(),
        method: filter.method.label(),
        series,
        excluded,
    })
}

/// Counter-cyclical series in the quarterly database: unemployment
/// (58-72, 197) and money stocks (158-162).
pub fn default_flip_ids(frequency: Frequency) -> Vec<u32> {
    match frequency {
        Frequency::Quarterly => (58..=72).chain([197]).chain(158..=162).collect(),
        Frequency::Monthly => (25..=31).chain(70..=73).collect(),
        _ => Vec::new(),
    }
}

/// Sample standard deviation (divisor `len - 1`) of the non-`NaN` entries.
pub fn sample_std(values: &[f64]) -> Option<f64> {
    let defined: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
    if defined.len() < 2 {
        return None;
    }
    let mean = defined.iter().sum::<f64>() / defined.len() as f64;
    let ss: f64 = defined.iter().map(|v| (v - mean) * (v - mean)).sum();
    Some(libm::sqrt(ss / (defined.len() - 1) as f64))
}

/// Divides each cycle by its sample standard deviation and negates the
/// series whose id is in `flip_ids`. Zero-variance cycles are excluded.
pub fn standardize_and_flip(cycles: &PanelCycles, flip_ids: &[u32]) -> PanelCycles {
    let mut out = PanelCycles {
        axis_len: cycles.axis_len,
        method: cycles.method.clone(),
        series: Vec::with_capacity(cycles.series.len()),
        excluded: cycles.excluded.clone(),
    };
    for s in &cycles.series {
        let sd = match sample_std(&s.cycle) {
            Some(sd) if sd > 0.0 && sd.is_finite() => sd,
            _ => {
                out.excluded.push(Exclusion {
                    id: s.id,
                    name: s.name.clone(),
                    reason: "zero-variance cycle cannot be standardized".into(),
                });
                continue;
            }
        };
        let sign = if flip_ids.contains(&s.id) { -1.0 } else { 1.0 };
        let mut standardized = s.clone();
        for v in standardized.cycle.iter_mut() {
            *v = sign * (*v / sd);
        }
        out.series.push(standardized);
    }
    out
}

/// Cross-sectional mean per date and the number of series behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateIndex {
    /// `NaN` where no series covers the date.
    pub values: Vec<f64>,
    pub coverage: Vec<usize>,
    pub method: String,
}

pub fn aggregate_index(cycles: &PanelCycles) -> Result<AggregateIndex> {
    if cycles.series.is_empty() {
        return Err(Error::Parameter("no usable series to aggregate".into()));
    }
    let len = cycles.axis_len;
    let mut sums = vec![0.0; len];
    let mut coverage = vec![0usize; len];
    for s in &cycles.series {
        for (j, &v) in s.cycle.iter().enumerate() {
            if v.is_nan() {
                continue;
            }
            let t = s.start + j;
            if t >= len {
                return Err(Error::Dimension {
                    expected: len,
                    got: t + 1,
                });
            }
            sums[t] += v;
            coverage[t] += 1;
        }
    }
    let values = sums
        .iter()
        .zip(&coverage)
        .map(|(&s, &c)| if c == 0 { f64::NAN } else { s / c as f64 })
        .collect();
    Ok(AggregateIndex {
        values,
        coverage,
        method: cycles.method.clone(),
    })
}

/// Display helper: clamps to `±limit`, leaving missing values alone. Never
/// applied to stored indices.
pub fn clamp_for_display(values: &[f64], limit: f64) -> Vec<f64> {
    values
        .iter()
        .map(|v| {
            if v.is_nan() {
                *v
            } else {
                v.clamp(-limit, limit)
            }
        })
        .collect()
}
