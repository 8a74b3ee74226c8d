//! Boosted HP filter: repeated application of the HP smoother to the
//! previous residual, `ĉ⁽ᵐ⁾ = (I - S)ᵐ y`, with either a fixed number of
//! iterations or the BIC-type stopping rule
//!
//! ```text
//! IC(m) = ĉ⁽ᵐ⁾'ĉ⁽ᵐ⁾ / ĉ⁽¹⁾'ĉ⁽¹⁾ + log(n) · tr(B_m) / tr(I - S),   B_m = I - (I - S)^m
//! ```

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hp::{validate_series, HpSmoother};
use crate::series::{FilterResult, FilterWarning, Frequency, MethodId};
use crate::spectrum::{smoother_traces, PenaltySpectrum};

pub const DEFAULT_M_MAX: usize = 200;

/// How the number of iterations is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stopping {
    Fixed(usize),
    Bic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostConfig {
    pub lambda: f64,
    pub m_max: usize,
    pub stopping: Stopping,
    pub frequency: Frequency,
}

impl BoostConfig {
    /// BIC stopping with the frequency's conventional `λ` and `m_max = 200`.
    /// `Custom` frequency has no default `λ`; use [`BoostConfig::custom`].
    pub fn for_frequency(frequency: Frequency) -> Result<Self> {
        let lambda = frequency.default_lambda().ok_or_else(|| {
            Error::Parameter("custom frequency requires an explicit lambda".into())
        })?;
        Ok(BoostConfig {
            lambda,
            m_max: DEFAULT_M_MAX,
            stopping: Stopping::Bic,
            frequency,
        })
    }

    pub fn custom(lambda: f64) -> Self {
        BoostConfig {
            lambda,
            m_max: DEFAULT_M_MAX,
            stopping: Stopping::Bic,
            frequency: Frequency::Custom,
        }
    }

    pub fn with_m_max(mut self, m_max: usize) -> Self {
        self.m_max = m_max;
        self
    }

    pub fn with_stopping(mut self, stopping: Stopping) -> Self {
        self.stopping = stopping;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::Parameter(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        if self.m_max == 0 {
            return Err(Error::Parameter("m_max must be at least 1".into()));
        }
        if let Stopping::Fixed(m) = self.stopping {
            if m == 0 || m > self.m_max {
                return Err(Error::Parameter(format!(
                    "fixed iterations must lie in 1..={}, got {m}",
                    self.m_max
                )));
            }
        }
        Ok(())
    }
}

/// `IC(m)` for `m = 1..=m_max` and its smallest minimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct IcPath {
    /// `values[m - 1] = IC(m)`.
    pub values: Vec<f64>,
    /// Smallest `m` attaining the minimum (1-based).
    pub argmin: usize,
}

impl IcPath {
    pub fn value(&self, m: usize) -> f64 {
        self.values[m - 1]
    }

    pub fn m_max(&self) -> usize {
        self.values.len()
    }

    fn from_values(values: Vec<f64>) -> Self {
        let mut argmin = 1;
        for (i, &v) in values.iter().enumerate() {
            if v < values[argmin - 1] {
                argmin = i + 1;
            }
        }
        IcPath { values, argmin }
    }
}

fn sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Runs the boosting recursion, calling `visit(m, trend, cycle)` after each
/// iteration. The trend is accumulated as `f⁽ᵐ⁾ = f⁽ᵐ⁻¹⁾ + S ĉ⁽ᵐ⁻¹⁾` so that
/// `m = 1` is exactly the HP trend.
fn iterate<F>(y: &[f64], smoother: &HpSmoother, m_max: usize, mut visit: F) -> Result<()>
where
    F: FnMut(usize, &[f64], &[f64]) -> bool,
{
    let mut trend = smoother.apply(y)?;
    let mut cycle: Vec<f64> = y.iter().zip(&trend).map(|(a, b)| a - b).collect();
    let mut step = cycle.clone();
    for m in 1..=m_max {
        if !visit(m, &trend, &cycle) || m == m_max {
            break;
        }
        step.copy_from_slice(&cycle);
        smoother.apply_in_place(&mut step)?;
        for ((f, c), s) in trend.iter_mut().zip(cycle.iter_mut()).zip(&step) {
            *f += s;
            *c -= s;
        }
    }
    Ok(())
}

fn check_context(y: &[f64], smoother: &HpSmoother) -> Result<()> {
    validate_series(y)?;
    if smoother.len() != y.len() {
        return Err(Error::Dimension {
            expected: smoother.len(),
            got: y.len(),
        });
    }
    Ok(())
}

/// Boosted HP with exactly `m` iterations. `m = 1` is the HP filter and
/// `m = 2` the "twicing" variant.
pub fn boosted_hp(y: &[f64], lambda: f64, m: usize) -> Result<FilterResult> {
    validate_series(y)?;
    let smoother = HpSmoother::new(y.len(), lambda)?;
    boosted_hp_with(y, &smoother, m)
}

/// [`boosted_hp`] with a prebuilt smoother.
pub fn boosted_hp_with(y: &[f64], smoother: &HpSmoother, m: usize) -> Result<FilterResult> {
    check_context(y, smoother)?;
    if m == 0 {
        return Err(Error::Parameter(
            "number of iterations must be at least 1".into(),
        ));
    }
    let mut out = None;
    iterate(y, smoother, m, |j, f, c| {
        if j == m {
            out = Some((f.to_vec(), c.to_vec()));
        }
        true
    })?;
    let (trend, cycle) = out.expect("iteration visits m");
    Ok(FilterResult {
        trend,
        cycle,
        method: if m == 1 {
            MethodId::Hp
        } else {
            MethodId::Boosted
        },
        iterations: m,
        ic_path: None,
        lambda: Some(smoother.lambda()),
        first_defined: 0,
        warning: None,
    })
}

/// Relative size below which the HP residual counts as identically zero.
const DEGENERATE_RESIDUAL: f64 = 1e-12;

fn degenerate_error() -> Error {
    Error::Degenerate(
        "HP residual is zero (input is affine); treat the series as pure trend".into(),
    )
}

/// `IC(m)` for `m = 1..=m_max`.
pub fn ic_path(y: &[f64], lambda: f64, m_max: usize) -> Result<IcPath> {
    validate_series(y)?;
    let smoother = HpSmoother::new(y.len(), lambda)?;
    let spectrum = PenaltySpectrum::new(y.len())?;
    ic_path_with(y, &smoother, &spectrum, m_max)
}

/// [`ic_path`] with a prebuilt smoother and spectrum.
pub fn ic_path_with(
    y: &[f64],
    smoother: &HpSmoother,
    spectrum: &PenaltySpectrum,
    m_max: usize,
) -> Result<IcPath> {
    Ok(run_bic(y, smoother, spectrum, m_max)?.0)
}

type BicRun = (IcPath, Vec<f64>, Vec<f64>);

fn run_bic(
    y: &[f64],
    smoother: &HpSmoother,
    spectrum: &PenaltySpectrum,
    m_max: usize,
) -> Result<BicRun> {
    check_context(y, smoother)?;
    if spectrum.len() != y.len() {
        return Err(Error::Dimension {
            expected: spectrum.len(),
            got: y.len(),
        });
    }
    let traces = smoother_traces(spectrum, smoother.lambda(), m_max)?;
    let log_n = libm::log(y.len() as f64);
    let y_norm = libm::sqrt(sum_sq(y));

    let mut values = Vec::with_capacity(m_max);
    let mut base = 0.0;
    let mut best = f64::INFINITY;
    let mut best_fit = (Vec::new(), Vec::new());
    let mut degenerate = false;
    iterate(y, smoother, m_max, |m, f, c| {
        let ss = sum_sq(c);
        if m == 1 {
            if libm::sqrt(ss) <= DEGENERATE_RESIDUAL * y_norm || ss == 0.0 {
                degenerate = true;
                return false;
            }
            base = ss;
        }
        let t = &traces[m - 1];
        let ic = ss / base + log_n * t.tr_boosted / t.tr_residual;
        if ic < best {
            best = ic;
            best_fit = (f.to_vec(), c.to_vec());
        }
        values.push(ic);
        true
    })?;
    if degenerate {
        return Err(degenerate_error());
    }
    let path = IcPath::from_values(values);
    Ok((path, best_fit.0, best_fit.1))
}

/// Boosted HP according to `config`: fixed iterations, or the smallest
/// minimizer `m̂` of `IC(m)` over `1..=m_max` (the full path is always
/// computed and returned).
pub fn boosted_hp_bic(y: &[f64], config: &BoostConfig) -> Result<FilterResult> {
    config.validate()?;
    validate_series(y)?;
    let smoother = HpSmoother::new(y.len(), config.lambda)?;
    let spectrum = PenaltySpectrum::new(y.len())?;
    boosted_hp_bic_with(y, config, &smoother, &spectrum)
}

/// [`boosted_hp_bic`] with a prebuilt smoother and spectrum.
pub fn boosted_hp_bic_with(
    y: &[f64],
    config: &BoostConfig,
    smoother: &HpSmoother,
    spectrum: &PenaltySpectrum,
) -> Result<FilterResult> {
    config.validate()?;
    if smoother.lambda() != config.lambda {
        return Err(Error::Parameter(format!(
            "smoother lambda {} does not match configured lambda {}",
            smoother.lambda(),
            config.lambda
        )));
    }
    if let Stopping::Fixed(m) = config.stopping {
        return boosted_hp_with(y, smoother, m);
    }
    let (path, trend, cycle) = run_bic(y, smoother, spectrum, config.m_max)?;
    let m_hat = path.argmin;
    let warning =
        (m_hat == config.m_max && config.m_max > 1).then_some(FilterWarning::StoppingNotInterior);
    Ok(FilterResult {
        trend,
        cycle,
        method: MethodId::BoostedBic,
        iterations: m_hat,
        ic_path: Some(path),
        lambda: Some(config.lambda),
        first_defined: 0,
        warning,
    })
}
