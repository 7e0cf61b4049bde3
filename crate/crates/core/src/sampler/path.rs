use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A counting path `ω = (x; t₁, …, tₙ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSample<T> {
    pub x0: u64,
    pub jump_times: Vec<T>,
}

impl<T: Scalar> PathSample<T> {
    pub fn new(x0: u64, jump_times: Vec<T>) -> Result<Self> {
        if jump_times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::NotSorted);
        }
        Ok(Self { x0, jump_times })
    }

    pub fn n(&self) -> u64 {
        self.jump_times.len() as u64
    }

    /// `X_t = x0 + #{j : t_j ≤ t}`.
    pub fn value_at(&self, t: T) -> u64 {
        self.x0 + self.jump_times.partition_point(|&tj| tj <= t) as u64
    }

    /// State just before the `j`-th jump (1-based).
    pub fn state_before(&self, j: usize) -> u64 {
        self.x0 + j as u64 - 1
    }

    /// `true` when every jump lies strictly inside `(s, u)`.
    pub fn inside(&self, s: T, u: T) -> bool {
        self.jump_times.iter().all(|&t| t > s && t < u)
    }
}
