//! Simulation designs: an observed series `y = f + c` where `f` is one of
//! ten stochastic trends and `c` a stationary AR(2) business cycle
//!
//! ```text
//! (1 - cos(φ) L + 0.25 L²) c_t = e_t,   e_t ~ N(0, σ_e²)
//! ```
//!
//! with `φ = π/10` for quarterly and `π/30` for monthly data.
//!
//! Designs 1-5 build on an I(2) trend, 6-10 on a local-to-unity (LUR)
//! autoregression with root `exp(c/n)`. Designs 4, 5, 9 and 10 are white
//! noise `w_t ~ N(0, σ_e²)` up to the break at `t = ⌈n/2⌉` and trending
//! afterwards.
//!
//! Draw order from the stream is fixed so that designs sharing a seed
//! share their randomness: first the `n` trend innovations `v_t ~ N(0, 1)`,
//! then the cycle (500 burn-in shocks followed by `n` kept ones), then the
//! `⌈n/2⌉` pre-break white-noise values (break designs only). All
//! recursions start from zero.
//!
//! After the break, designs 9 and 10 add a LUR that by default restarts
//! from zero at `t = ⌈n/2⌉ + 1`. [`LurBreak::Continued`] instead adds the
//! value at `t` of the LUR run over the whole sample.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::SimRng;
use crate::series::Frequency;

pub const CYCLE_BURN_IN: usize = 500;
pub const CYCLE_AR2: f64 = 0.25;

/// Post-break LUR component of designs 9 and 10.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LurBreak {
    #[default]
    Restarted,
    Continued,
}

/// Full description of one synthetic draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DgpSpec {
    pub id: u8,
    pub n: usize,
    pub frequency: Frequency,
    /// Localizing coefficient, required by designs 6-10.
    pub c: Option<f64>,
    pub sigma_e: f64,
    pub seed: u64,
    pub lur_break: LurBreak,
}

impl DgpSpec {
    /// Design `id` with its default cycle scale (`σ_e = 5` for 1-5, `1` for
    /// 6-10) and no localizing coefficient.
    pub fn new(id: u8, n: usize, frequency: Frequency, seed: u64) -> Self {
        let sigma_e = if id <= 5 { 5.0 } else { 1.0 };
        DgpSpec {
            id,
            n,
            frequency,
            c: None,
            sigma_e,
            seed,
            lur_break: LurBreak::Restarted,
        }
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = Some(c);
        self
    }

    pub fn with_sigma_e(mut self, sigma_e: f64) -> Self {
        self.sigma_e = sigma_e;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_lur_break(mut self, lur_break: LurBreak) -> Self {
        self.lur_break = lur_break;
        self
    }

    pub fn phi(&self) -> Result<f64> {
        self.frequency
            .cycle_phi()
            .ok_or_else(|| Error::Spec(format!("no cycle frequency for {} data", self.frequency)))
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=10).contains(&self.id) {
            return Err(Error::Spec(format!(
                "design id must be in 1..=10, got {}",
                self.id
            )));
        }
        if self.n < 2 {
            return Err(Error::Spec(format!("n must be at least 2, got {}", self.n)));
        }
        if !(self.sigma_e >= 0.0) || !self.sigma_e.is_finite() {
            return Err(Error::Spec(format!(
                "sigma_e must be nonnegative, got {}",
                self.sigma_e
            )));
        }
        if self.id >= 6 {
            match self.c {
                Some(c) if c.is_finite() => {}
                Some(c) => return Err(Error::Spec(format!("c must be finite, got {c}"))),
                None => {
                    return Err(Error::Spec(format!(
                        "design {} needs a localizing coefficient c",
                        self.id
                    )))
                }
            }
        }
        self.phi().map(|_| ())
    }

    fn has_break(&self) -> bool {
        matches!(self.id, 4 | 5 | 9 | 10)
    }
}

/// One draw: true trend, true cycle and the observed sum.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedDraw {
    pub trend: Vec<f64>,
    pub cycle: Vec<f64>,
    pub y: Vec<f64>,
}

/// `100 t / n - 50`.
pub fn det_lin(t: usize, n: usize) -> f64 {
    100.0 * t as f64 / n as f64 - 50.0
}

/// `5 (100 t/n)^{1/5} cos(0.05 π (100 t/n)^{0.9})`.
pub fn det_snd(t: usize, n: usize) -> f64 {
    let x = 100.0 * t as f64 / n as f64;
    5.0 * libm::pow(x, 0.2) * libm::cos(0.05 * core::f64::consts::PI * libm::pow(x, 0.9))
}

/// `500 (t/n)³`.
pub fn det_cubic(t: usize, n: usize) -> f64 {
    let r = t as f64 / n as f64;
    500.0 * r * r * r
}

/// Last pre-break index: `⌈n/2⌉`.
pub fn break_point(n: usize) -> usize {
    n.div_ceil(2)
}

/// Stationary AR(2) cycle of length `n` with coefficients `(cos φ, -0.25)`,
/// started at zero and run through [`CYCLE_BURN_IN`] discarded steps.
pub fn gen_cycle(n: usize, phi: f64, sigma_e: f64, rng: &mut SimRng) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Spec("cycle length must be at least 1".into()));
    }
    if !(sigma_e >= 0.0) || !sigma_e.is_finite() || !phi.is_finite() {
        return Err(Error::Spec(format!(
            "invalid cycle parameters phi={phi}, sigma_e={sigma_e}"
        )));
    }
    let a1 = libm::cos(phi);
    let (mut lag1, mut lag2) = (0.0, 0.0);
    let mut out = Vec::with_capacity(n);
    for step in 0..CYCLE_BURN_IN + n {
        let c = a1 * lag1 - CYCLE_AR2 * lag2 + rng.normal(sigma_e);
        lag2 = lag1;
        lag1 = c;
        if step >= CYCLE_BURN_IN {
            out.push(c);
        }
    }
    Ok(out)
}

/// Partial double sums `Σ_{s≤t} Σ_{r≤s} v_r` (an I(2) path from zero).
fn integrate_twice(v: &[f64]) -> Vec<f64> {
    let mut x = 0.0;
    let mut f = 0.0;
    v.iter()
        .map(|&e| {
            x += e;
            f += x;
            f
        })
        .collect()
}

/// `f_t = exp(c/n) f_{t-1} + v_t` from zero.
fn local_unit_root(v: &[f64], c: f64, n: usize) -> Vec<f64> {
    let rho = libm::exp(c / n as f64);
    let mut f = 0.0;
    v.iter()
        .map(|&e| {
            f = rho * f + e;
            f
        })
        .collect()
}

/// Generates one draw of design `spec.id`.
pub fn gen_dgp(spec: &DgpSpec) -> Result<SimulatedDraw> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = SimRng::new(spec.seed);
    let v: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
    let cycle = gen_cycle(n, spec.phi()?, spec.sigma_e, &mut rng)?;
    let half = break_point(n);
    let w: Vec<f64> = if spec.has_break() {
        (0..half).map(|_| rng.normal(spec.sigma_e)).collect()
    } else {
        Vec::new()
    };
    let c = spec.c.unwrap_or(0.0);

    // index i is time t = i + 1
    let mut trend = match spec.id {
        1..=3 => integrate_twice(&v),
        6..=8 => local_unit_root(&v, c, n),
        4 | 5 => {
            let post = integrate_twice(&v[half..]);
            let mut f = w.clone();
            f.extend(post.iter().enumerate().map(|(j, s)| {
                let lin = det_lin(half + j + 1, n);
                lin * lin + s
            }));
            f
        }
        9 | 10 => {
            let post = match spec.lur_break {
                LurBreak::Restarted => local_unit_root(&v[half..], c, n),
                LurBreak::Continued => local_unit_root(&v, c, n).split_off(half),
            };
            let mut f = w.clone();
            f.extend(
                post.iter()
                    .enumerate()
                    .map(|(j, s)| det_lin(half + j + 1, n) + s),
            );
            f
        }
        _ => unreachable!("validated"),
    };
    match spec.id {
        2 | 5 | 7 | 10 => add(&mut trend, det_snd, n),
        3 | 8 => add(&mut trend, det_cubic, n),
        _ => {}
    }
    let y = trend.iter().zip(&cycle).map(|(f, c)| f + c).collect();
    Ok(SimulatedDraw { trend, cycle, y })
}

fn add(f: &mut [f64], g: fn(usize, usize) -> f64, n: usize) {
    for (i, x) in f.iter_mut().enumerate() {
        *x += g(i + 1, n);
    }
}
