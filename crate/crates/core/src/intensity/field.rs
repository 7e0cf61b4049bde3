use std::collections::HashMap;
use std::sync::Mutex;

use super::IntensityModel;
use crate::error::Result;
use crate::scalar::Scalar;

/// Ξ of a model with a memo of evaluated points. Lookups are keyed by the
/// exact bit pattern of `t`, so cached and uncached results are identical.
#[derive(Debug)]
pub struct CharacteristicField<T> {
    source: IntensityModel<T>,
    cache: Mutex<HashMap<(u64, u64), T>>,
}

impl<T: Scalar> CharacteristicField<T> {
    pub fn new(source: IntensityModel<T>) -> Self {
        Self { source, cache: Mutex::new(HashMap::new()) }
    }

    pub fn source(&self) -> &IntensityModel<T> {
        &self.source
    }

    pub fn value(&self, t: T, z: u64) -> Result<T> {
        let key = (t.as_f64().to_bits(), z);
        if let Some(v) = self.cache.lock().expect("cache poisoned").get(&key) {
            return Ok(*v);
        }
        let v = self.source.characteristic(t, z)?;
        self.cache.lock().expect("cache poisoned").insert(key, v);
        Ok(v)
    }

    pub fn cached_points(&self) -> usize {
        self.cache.lock().expect("cache poisoned").len()
    }
}
