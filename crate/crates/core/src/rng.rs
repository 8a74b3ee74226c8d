//! Reproducible random streams for the simulations.
//!
//! Algorithm `chacha20-le64-boxmuller-v1`:
//!
//! - generator: ChaCha20 (20 rounds), key = the 64-bit seed in little-endian
//!   order followed by 24 zero bytes, stream 0, counter 0;
//! - uniforms: `(next_u64 >> 11) · 2⁻⁵³` in `[0, 1)`;
//! - normals: Box-Muller on consecutive uniforms `(u₁, u₂)`, returning
//!   `√(-2 ln(1 - u₁)) cos(2π u₂)` then `… sin(2π u₂)` for the next call;
//! - replication `r` of a run with base seed `s` uses seed `s XOR r`.

use core::f64::consts::TAU;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

pub const ALGORITHM: &str = "chacha20-le64-boxmuller-v1";

#[derive(Debug, Clone)]
pub struct SimRng {
    inner: ChaCha20Rng,
    spare: Option<f64>,
}

impl SimRng {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        SimRng {
            inner: ChaCha20Rng::from_seed(key),
            spare: None,
        }
    }

    /// Independent substream for replication `index`.
    pub fn replication(base_seed: u64, index: u64) -> Self {
        Self::new(replication_seed(base_seed, index))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = libm::sqrt(-2.0 * libm::log(u1));
        let angle = TAU * u2;
        self.spare = Some(radius * libm::sin(angle));
        radius * libm::cos(angle)
    }

    pub fn normal(&mut self, sd: f64) -> f64 {
        sd * self.standard_normal()
    }
}

pub fn replication_seed(base_seed: u64, index: u64) -> u64 {
    base_seed ^ index
}
