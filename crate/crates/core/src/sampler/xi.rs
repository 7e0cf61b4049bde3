//! Cumulative potentials `ξ_j(t) = ∫_0^t Ξ(r, x + j − 1) dr` and the
//! unnormalized jump-time density `exp(Σ_j ξ_j(t_j))` on the ordered
//! simplex.

use crate::engine::BridgeSpec;
use crate::error::{Error, Result};
use crate::intensity::IntensityModel;
use crate::scalar::Scalar;

pub const DEFAULT_XI_STEP: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct XiPotential<T> {
    spec: BridgeSpec<T>,
    step: T,
    cells: usize,
    /// `values[j][k] = ξ_{j+1}(k · step)`
    values: Vec<Vec<T>>,
    /// `slopes[j][k] = Ξ(k · step, x + j)`
    slopes: Vec<Vec<T>>,
}

impl<T: Scalar> XiPotential<T> {
    /// Cumulative trapezoid integration of Ξ(·, x + j − 1), j = 1..n, on
    /// `[0, 1]` with spacing `grid_step`. Off-grid values use cubic Hermite
    /// interpolation with the tabulated Ξ as node slopes.
    pub fn new(model: &IntensityModel<T>, spec: &BridgeSpec<T>, grid_step: T) -> Result<Self> {
        spec.validate()?;
        if !(grid_step > T::zero() && grid_step < T::one()) {
            return Err(Error::BadStep { step: grid_step.as_f64(), window: 1.0 });
        }
        let cells = (T::one() / grid_step).round().to_usize().unwrap_or(1).max(1);
        let step = T::one() / T::from_usize(cells);
        let n = spec.height() as usize;
        let half = step / T::lit(2.0);
        let mut values = Vec::with_capacity(n);
        let mut slopes = Vec::with_capacity(n);
        for j in 0..n {
            let z = spec.x + j as u64;
            let xi: Vec<T> = (0..=cells)
                .map(|k| model.characteristic(T::from_usize(k) / T::from_usize(cells), z))
                .collect::<Result<_>>()?;
            let mut acc = T::zero();
            let mut cum = Vec::with_capacity(cells + 1);
            cum.push(acc);
            for k in 0..cells {
                acc += half * (xi[k] + xi[k + 1]);
                cum.push(acc);
            }
            values.push(cum);
            slopes.push(xi);
        }
        Ok(Self { spec: *spec, step, cells, values, slopes })
    }

    pub fn spec(&self) -> &BridgeSpec<T> {
        &self.spec
    }

    pub fn height(&self) -> usize {
        self.values.len()
    }

    pub fn step(&self) -> T {
        self.step
    }

    /// Node values of ξ_j (`j` is 1-based).
    pub fn table(&self, j: usize) -> &[T] {
        &self.values[j - 1]
    }

    /// ξ_j(t) for `j` in `1..=n`.
    pub fn xi(&self, j: usize, t: T) -> T {
        let (v, d) = (&self.values[j - 1], &self.slopes[j - 1]);
        let pos = (t / self.step).max(T::zero());
        let k = pos.floor().to_usize().unwrap_or(0).min(self.cells - 1);
        let s = pos - T::from_usize(k);
        let h = self.step;
        let s2 = s * s;
        let s3 = s2 * s;
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        (two * s3 - three * s2 + T::one()) * v[k]
            + (s3 - two * s2 + s) * h * d[k]
            + (three * s2 - two * s3) * v[k + 1]
            + (s3 - s2) * h * d[k + 1]
    }

    /// ξ(𝐭) = Σ_j ξ_j(t_j) for a sorted jump-time vector.
    pub fn potential(&self, times: &[T]) -> Result<T> {
        self.check_times(times)?;
        Ok(times.iter().enumerate().map(|(j, &t)| self.xi(j + 1, t)).sum())
    }

    fn check_times(&self, times: &[T]) -> Result<()> {
        if times.len() != self.height() {
            return Err(Error::InvalidInput(format!(
                "expected {} jump times, got {}",
                self.height(),
                times.len()
            )));
        }
        let inside = times.iter().all(|&t| t > self.spec.s && t < self.spec.u);
        if !inside || times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::NotSorted);
        }
        Ok(())
    }
}

/// `exp(ξ(𝐭))`: the jump-time density of the bridge up to its normalizer.
pub fn density_unnormalized<T: Scalar>(pot: &XiPotential<T>, times: &[T]) -> Result<T> {
    Ok(pot.potential(times)?.exp())
}

/// Convenience wrapper over [`XiPotential::new`].
pub fn xi_tables<T: Scalar>(
    model: &IntensityModel<T>,
    spec: &BridgeSpec<T>,
    grid_step: T,
) -> Result<XiPotential<T>> {
    XiPotential::new(model, spec, grid_step)
}
