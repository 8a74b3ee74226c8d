//! Shared operator caches. Readers take a read lock; a miss builds the
//! operator outside the lock and the first insert wins, so concurrent
//! population is idempotent.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use bhp_core::hp::HpSmoother;
use bhp_core::spectrum::PenaltySpectrum;

#[derive(Debug, Default)]
pub struct SmootherCache {
    inner: RwLock<HashMap<(usize, u64), Arc<HpSmoother>>>,
}

impl SmootherCache {
    pub fn get(&self, n: usize, lambda: f64) -> bhp_core::Result<Arc<HpSmoother>> {
        let key = (n, lambda.to_bits());
        if let Some(s) = self.inner.read().unwrap().get(&key) {
            return Ok(Arc::clone(s));
        }
        let built = Arc::new(HpSmoother::new(n, lambda)?);
        let mut map = self.inner.write().unwrap();
        Ok(Arc::clone(map.entry(key).or_insert(built)))
    }

    pub fn len(&self) -> usize {
        self.inner.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Default)]
pub struct SpectrumCache {
    inner: RwLock<HashMap<usize, Arc<PenaltySpectrum>>>,
}

impl SpectrumCache {
    pub fn get(&self, n: usize) -> bhp_core::Result<Arc<PenaltySpectrum>> {
        if let Some(s) = self.inner.read().unwrap().get(&n) {
            return Ok(Arc::clone(s));
        }
        let built = Arc::new(PenaltySpectrum::new(n)?);
        let mut map = self.inner.write().unwrap();
        Ok(Arc::clone(map.entry(n).or_insert(built)))
    }

    pub fn len(&self) -> usize {
        self.inner.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
