use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Endpoints `(x, y)` and window `(s, u)` of a bridge: the process is
/// pinned at `x` at time `s` and at `y` at time `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BridgeSpec<T> {
    pub x: u64,
    pub y: u64,
    pub s: T,
    pub u: T,
}

impl<T: Scalar> BridgeSpec<T> {
    pub fn new(x: u64, y: u64, s: T, u: T) -> Result<Self> {
        let spec = Self { x, y, s, u };
        spec.validate()?;
        Ok(spec)
    }

    /// Bridge on the unit window `[0, 1]`.
    pub fn unit(x: u64, y: u64) -> Result<Self> {
        Self::new(x, y, T::zero(), T::one())
    }

    pub fn validate(&self) -> Result<()> {
        if self.x > self.y {
            return Err(Error::InvalidBridge(format!("x={} > y={}", self.x, self.y)));
        }
        if !(self.s >= T::zero() && self.s < self.u && self.u <= T::one()) {
            return Err(Error::InvalidBridge(format!(
                "need 0 <= s < u <= 1, got s={}, u={}",
                self.s, self.u
            )));
        }
        Ok(())
    }

    /// Height `y − x`: the number of jumps every bridge path makes.
    pub fn height(&self) -> u64 {
        self.y - self.x
    }

    pub fn length(&self) -> T {
        self.u - self.s
    }

    pub fn contains_time(&self, t: T) -> bool {
        t >= self.s && t <= self.u
    }
}
