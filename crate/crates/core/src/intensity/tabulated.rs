//! Grid-tabulated intensities, interpolated in time by cubic Hermite
//! splines so that the derivative is consistent with the values.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeSource {
    /// Node derivatives were provided with the table.
    Supplied,
    /// Node derivatives were filled in by centered differences.
    Numeric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table<T> {
    t_grid: Vec<T>,
    z_min: u64,
    /// `rates[time index][state index]`
    rates: Vec<Vec<T>>,
    rates_dt: Vec<Vec<T>>,
    derivative: DerivativeSource,
}

impl<T: Scalar> Table<T> {
    pub fn new(
        t_grid: Vec<T>,
        z_min: u64,
        rates: Vec<Vec<T>>,
        rates_dt: Option<Vec<Vec<T>>>,
    ) -> Result<Self> {
        if t_grid.len() < 2 {
            return Err(Error::InvalidModel("t_grid needs at least 2 nodes".into()));
        }
        if t_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidModel("t_grid must be strictly increasing".into()));
        }
        if rates.len() != t_grid.len() {
            return Err(Error::InvalidModel(format!(
                "rates has {} rows, t_grid has {} nodes",
                rates.len(),
                t_grid.len()
            )));
        }
        let width = rates[0].len();
        if width == 0 || rates.iter().any(|r| r.len() != width) {
            return Err(Error::InvalidModel("rates rows must be non-empty and equal length".into()));
        }
        if rates.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidModel("rates must be finite".into()));
        }
        let (rates_dt, derivative) = match rates_dt {
            Some(d) => {
                if d.len() != rates.len() || d.iter().any(|r| r.len() != width) {
                    return Err(Error::InvalidModel("rates_dt shape differs from rates".into()));
                }
                (d, DerivativeSource::Supplied)
            }
            None => (centered_differences(&t_grid, &rates), DerivativeSource::Numeric),
        };
        Ok(Self { t_grid, z_min, rates, rates_dt, derivative })
    }

    pub fn t_grid(&self) -> &[T] {
        &self.t_grid
    }

    pub fn z_min(&self) -> u64 {
        self.z_min
    }

    pub fn z_max(&self) -> u64 {
        self.z_min + self.rates[0].len() as u64 - 1
    }

    pub fn rates(&self) -> &[Vec<T>] {
        &self.rates
    }

    pub fn rates_dt(&self) -> &[Vec<T>] {
        &self.rates_dt
    }

    pub fn derivative_source(&self) -> DerivativeSource {
        self.derivative
    }

    fn locate(&self, t: T, z: u64) -> Result<(usize, usize)> {
        let first = self.t_grid[0];
        let last = *self.t_grid.last().unwrap();
        if z < self.z_min || z > self.z_max() || t < first || t > last {
            return Err(Error::TabulationGap { t: t.as_f64(), z });
        }
        let cell = self.t_grid.partition_point(|&g| g <= t).clamp(1, self.t_grid.len() - 1) - 1;
        Ok((cell, (z - self.z_min) as usize))
    }

    pub fn value(&self, t: T, z: u64) -> Result<T> {
        let (k, j) = self.locate(t, z)?;
        let (h, s) = self.cell(k, t);
        let (y0, y1) = (self.rates[k][j], self.rates[k + 1][j]);
        let (m0, m1) = (self.rates_dt[k][j], self.rates_dt[k + 1][j]);
        let s2 = s * s;
        let s3 = s2 * s;
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        Ok((two * s3 - three * s2 + T::one()) * y0
            + (s3 - two * s2 + s) * h * m0
            + (three * s2 - two * s3) * y1
            + (s3 - s2) * h * m1)
    }

    pub fn derivative(&self, t: T, z: u64) -> Result<T> {
        let (k, j) = self.locate(t, z)?;
        let (h, s) = self.cell(k, t);
        let (y0, y1) = (self.rates[k][j], self.rates[k + 1][j]);
        let (m0, m1) = (self.rates_dt[k][j], self.rates_dt[k + 1][j]);
        let s2 = s * s;
        let six = T::lit(6.0);
        Ok(((six * s2 - six * s) * (y0 - y1)) / h
            + (T::lit(3.0) * s2 - T::lit(4.0) * s + T::one()) * m0
            + (T::lit(3.0) * s2 - T::lit(2.0) * s) * m1)
    }

    fn cell(&self, k: usize, t: T) -> (T, T) {
        let h = self.t_grid[k + 1] - self.t_grid[k];
        (h, (t - self.t_grid[k]) / h)
    }

    pub(crate) fn increment_bounds(&self) -> (T, T) {
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for row in &self.rates {
            for w in row.windows(2) {
                let d = w[1] - w[0];
                lo = lo.min(d);
                hi = hi.max(d);
            }
        }
        if lo > hi {
            (T::zero(), T::zero())
        } else {
            (lo, hi)
        }
    }
}

fn centered_differences<T: Scalar>(t: &[T], rates: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = t.len();
    (0..n)
        .map(|k| {
            let (a, b) = match k {
                0 => (0, 1),
                k if k == n - 1 => (n - 2, n - 1),
                k => (k - 1, k + 1),
            };
            rates[a]
                .iter()
                .zip(&rates[b])
                .map(|(&ra, &rb)| (rb - ra) / (t[b] - t[a]))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sampled(n: usize, with_dt: bool) -> Table<f64> {
        // ℓ(t, z) = (1 + z) e^{2t}
        let t: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
        let rates = t.iter().map(|&t| (0..4).map(|z| (1.0 + z as f64) * (2.0 * t).exp()).collect()).collect();
        let dt = with_dt.then(|| {
            t.iter().map(|&t| (0..4).map(|z| 2.0 * (1.0 + z as f64) * (2.0 * t).exp()).collect()).collect()
        });
        Table::new(t, 2, rates, dt).unwrap()
    }

    #[test]
    fn hermite_reproduces_nodes_and_is_accurate() {
        let tab = sampled(41, true);
        assert_eq!(tab.derivative_source(), DerivativeSource::Supplied);
        assert_eq!(tab.value(0.5, 3).unwrap(), 2.0 * 1f64.exp());
        let exact = 3.0 * (2.0f64 * 0.3137).exp();
        assert!((tab.value(0.3137, 4).unwrap() - exact).abs() < 1e-7);
    }

    #[test]
    fn derivative_consistent_with_values() {
        let tab = sampled(21, false);
        assert_eq!(tab.derivative_source(), DerivativeSource::Numeric);
        let h = 1e-6;
        for i in 1..99 {
            let t = i as f64 / 100.0;
            let fd = (tab.value(t + h, 2).unwrap() - tab.value(t - h, 2).unwrap()) / (2.0 * h);
            let d = tab.derivative(t, 2).unwrap();
            assert!((fd - d).abs() < 1e-5 * (1.0 + d.abs()), "t={t}");
        }
    }

    #[test]
    fn gaps_are_reported() {
        let tab = sampled(5, true);
        assert!(matches!(tab.value(0.5, 1), Err(Error::TabulationGap { .. })));
        assert!(matches!(tab.value(0.5, 6), Err(Error::TabulationGap { .. })));
        let short = Table::new(vec![0.0, 0.5], 0, vec![vec![1.0], vec![1.0]], None).unwrap();
        assert!(matches!(short.value(0.7, 0), Err(Error::TabulationGap { .. })));
    }

    #[test]
    fn shape_errors() {
        assert!(Table::<f64>::new(vec![0.0, 1.0], 0, vec![vec![1.0]], None).is_err());
        assert!(Table::<f64>::new(vec![0.0, 0.0], 0, vec![vec![1.0], vec![1.0]], None).is_err());
    }
}
