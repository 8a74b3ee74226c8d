//! Trend-cycle decomposition with the Hodrick-Prescott filter and its boosted
//! (iterated) variant.
//!
//! The crate is `no_std` and only needs an allocator. It contains every
//! numerical piece of the toolkit:
//!
//! - [`penalty`], [`banded`], [`spectrum`] and [`hp`]: the exact finite-sample
//!   HP smoother `S = (I + λ D D')⁻¹`, solved with a pentadiagonal Cholesky
//!   factorization, plus the spectrum of `D D'` used for trace computations.
//! - [`boosting`]: the boosted HP filter, fixed number of iterations or with
//!   the BIC-type stopping rule.
//! - [`ar`]: the autoregressive comparison filter.
//! - [`dgp`]: seeded generators for the ten simulation designs.
//! - [`metrics`]: trimmed trend MSE and per-replication method evaluation.
//! - [`panel`] and [`actest`]: panel standardization, aggregate indices and
//!   the robust autocorrelation test.
//! - [`theory`]: numerical checks of the residual operator's shrinkage
//!   behaviour on trigonometric, exponential and polynomial inputs.
//!
//! File formats, the command line and the parallel Monte-Carlo driver live
//! in the `bhp` crate.

#![no_std]

extern crate alloc;

pub mod actest;
pub mod ar;
pub mod banded;
pub mod boosting;
pub mod dgp;
mod eigen;
pub mod error;
pub mod hp;
pub mod metrics;
mod ols;
pub mod panel;
pub mod penalty;
pub mod rng;
pub mod series;
mod special;
pub mod spectrum;
pub mod theory;

pub use error::{Error, Result};
pub use series::{FilterResult, Frequency, MethodId};
