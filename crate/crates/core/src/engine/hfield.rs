//! Doob h-function `h(t, z) = P(X_u = y | X_t = z)` on the ladder
//! `{x..y}`, solved backward from the pin with log-space RK4.

use super::chain::{Coefficients, LogChain};
use super::grid::{TimeGrid, TERMINAL_STEP};
use super::BridgeSpec;
use crate::error::{Error, Result};
use crate::intensity::IntensityModel;
use crate::scalar::{ln_factorial, Scalar};

/// Largest `h_step` accepted by the solver.
pub const MAX_H_STEP: f64 = 1e-2;

#[derive(Debug, Clone)]
pub struct HField<T> {
    spec: BridgeSpec<T>,
    grid: TimeGrid<T>,
    /// `log h` per node, indexed `[node][z − x]`.
    log_h: Vec<Vec<T>>,
    /// `log h(t, z) − (y − z) log(u − t)`, with its exact limit at `t = u`.
    /// Interpolated linearly between nodes; it stays bounded at the pin.
    regular: Vec<Vec<T>>,
}

fn check_step<T: Scalar>(spec: &BridgeSpec<T>, h_step: T) -> Result<()> {
    let window = spec.length();
    if !(h_step > T::zero() && h_step < window && h_step <= T::lit(MAX_H_STEP)) {
        return Err(Error::BadStep { step: h_step.as_f64(), window: window.as_f64() });
    }
    Ok(())
}

impl<T: Scalar> HField<T> {
    /// Solves the backward system
    /// `∂_t h(t, z) = −ℓ(t, z) [h(t, z+1) − h(t, z)]`, `h(·, y+1) = 0`,
    /// `h(u, z) = 1{z = y}` on a grid of step `h_step` (refined near `u`).
    pub fn solve(model: &IntensityModel<T>, spec: &BridgeSpec<T>, h_step: T) -> Result<Self> {
        spec.validate()?;
        check_step(spec, h_step)?;
        let grid = TimeGrid::bridge(spec.s, spec.u, h_step, T::lit(TERMINAL_STEP));
        Self::solve_on_grid(model, spec, grid)
    }

    pub(crate) fn solve_on_grid(
        model: &IntensityModel<T>,
        spec: &BridgeSpec<T>,
        grid: TimeGrid<T>,
    ) -> Result<Self> {
        model.check_positive(spec.x, spec.y)?;
        let m = (spec.height() + 1) as usize;
        let nodes = grid.nodes();
        let last = nodes.len() - 1;

        // chain index k ↔ state z = y − k
        let coeffs = |t: T| -> Result<Coefficients<T>> {
            let mut c = Coefficients::zeros(m);
            for k in 0..m {
                let rate = model.eval(t, spec.y - k as u64)?;
                c.decay[k] = rate;
                c.feed[k] = rate;
            }
            Ok(c)
        };

        let mut chain = LogChain::new(m);
        let mut v = vec![T::neg_infinity(); m];
        v[0] = T::zero();
        let mut log_h = vec![Vec::new(); nodes.len()];
        log_h[last] = v.iter().rev().copied().collect();
        let mut end = coeffs(nodes[last])?;
        for i in (0..last).rev() {
            let (lo, hi) = (nodes[i], nodes[i + 1]);
            let start = end;
            let mid = coeffs((lo + hi) / T::lit(2.0))?;
            end = coeffs(lo)?;
            chain.step(&mut v, hi - lo, &start, &mid, &end);
            log_h[i] = v.iter().rev().copied().collect();
        }

        let mut regular = Vec::with_capacity(nodes.len());
        for (i, row) in log_h.iter().enumerate().take(last) {
            let log_tau = (spec.u - nodes[i]).ln();
            regular.push(
                row.iter()
                    .enumerate()
                    .map(|(j, &lh)| lh - T::from_u64(spec.height() - j as u64) * log_tau)
                    .collect(),
            );
        }
        // h(t, z) ~ Π_{j=z}^{y−1} ℓ(u, j) (u − t)^{y−z} / (y − z)!
        let mut limit = vec![T::zero(); m];
        let mut acc = T::zero();
        for j in (0..m - 1).rev() {
            acc += model.eval(spec.u, spec.x + j as u64)?.ln();
            limit[j] = acc - ln_factorial::<T>(spec.height() - j as u64);
        }
        regular.push(limit);

        Ok(Self { spec: *spec, grid, log_h, regular })
    }

    pub fn spec(&self) -> &BridgeSpec<T> {
        &self.spec
    }

    pub fn grid(&self) -> &TimeGrid<T> {
        &self.grid
    }

    /// `log h` at grid node `i` for state `z`.
    pub fn log_h_node(&self, i: usize, z: u64) -> T {
        self.log_h[i][(z - self.spec.x) as usize]
    }

    /// `log p_{s,u}(x, y)`: the log normalizer of the bridge law.
    pub fn log_transition(&self) -> T {
        self.log_h[0][0]
    }

    fn check_query(&self, t: T, z: u64) -> Result<()> {
        if !(t >= self.spec.s && t < self.spec.u) {
            return Err(Error::OutOfDomain(format!(
                "t={t} outside [{}, {})",
                self.spec.s, self.spec.u
            )));
        }
        if z < self.spec.x || z > self.spec.y {
            return Err(Error::OutOfDomain(format!(
                "z={z} outside ladder [{}, {}]",
                self.spec.x, self.spec.y
            )));
        }
        Ok(())
    }

    fn regular_at(&self, t: T, j: usize) -> T {
        let i = self.grid.cell(t);
        let nodes = self.grid.nodes();
        let (a, b) = (self.regular[i][j], self.regular[i + 1][j]);
        if !(a.is_finite() && b.is_finite()) {
            return T::neg_infinity();
        }
        let w = (t - nodes[i]) / (nodes[i + 1] - nodes[i]);
        a + (b - a) * w
    }

    /// `log h(t, z)` for `t ∈ [s, u)`, interpolated between nodes.
    pub fn log_h(&self, t: T, z: u64) -> Result<T> {
        self.check_query(t, z)?;
        let j = (z - self.spec.x) as usize;
        let r = self.regular_at(t, j);
        Ok(r + T::from_u64(self.spec.y - z) * (self.spec.u - t).ln())
    }

    /// Bridge intensity `ℓ(t, z) h(t, z+1) / h(t, z)`; zero at `z = y`.
    pub fn bridge_intensity(&self, model: &IntensityModel<T>, t: T, z: u64) -> Result<T> {
        self.check_query(t, z)?;
        if z == self.spec.y {
            return Ok(T::zero());
        }
        let j = (z - self.spec.x) as usize;
        let here = self.regular_at(t, j);
        let next = self.regular_at(t, j + 1);
        if !here.is_finite() || !next.is_finite() {
            return Err(Error::Underflow { t: t.as_f64(), z });
        }
        Ok(model.eval(t, z)? * (next - here).exp() / (self.spec.u - t))
    }

    /// Bridge intensity at grid node `i` (`i` below the last node). States
    /// whose `h` vanished numerically carry no mass and get rate zero.
    pub(crate) fn node_intensity(&self, model: &IntensityModel<T>, i: usize, z: u64) -> Result<T> {
        if z == self.spec.y {
            return Ok(T::zero());
        }
        let j = (z - self.spec.x) as usize;
        let (here, next) = (self.log_h[i][j], self.log_h[i][j + 1]);
        if !here.is_finite() {
            return Ok(T::zero());
        }
        Ok(model.eval(self.grid.nodes()[i], z)? * (next - here).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson_one_jump_closed_form() {
        let alpha = 2.5;
        let model = IntensityModel::<f64>::poisson(alpha).unwrap();
        let spec = BridgeSpec::unit(0, 1).unwrap();
        let h = HField::solve(&model, &spec, 1e-3).unwrap();
        for k in 1..20 {
            let t = k as f64 / 20.0;
            let tau = 1.0 - t;
            let h0 = (alpha * tau).ln() - alpha * tau;
            let h1 = -alpha * tau;
            assert!((h.log_h(t, 0).unwrap() - h0).abs() < 1e-9, "t={t}");
            assert!((h.log_h(t, 1).unwrap() - h1).abs() < 1e-9, "t={t}");
            let k0 = h.bridge_intensity(&model, t, 0).unwrap();
            assert!((k0 - 1.0 / tau).abs() < 1e-7 / tau, "t={t}: {k0}");
            assert_eq!(h.bridge_intensity(&model, t, 1).unwrap(), 0.0);
        }
    }

    #[test]
    fn poisson_transition_probability() {
        let model = IntensityModel::<f64>::poisson(1.0).unwrap();
        let h = HField::solve(&model, &BridgeSpec::unit(0, 5).unwrap(), 1e-3).unwrap();
        let want = 0.003_065_662_009_762_019f64;
        assert!((h.log_transition().exp() - want).abs() < 1e-12);
    }

    #[test]
    fn flat_bridge_keeps_no_jump_probability() {
        let model = IntensityModel::<f64>::time_exponential(1.0, 1.0).unwrap();
        let h = HField::solve(&model, &BridgeSpec::unit(3, 3).unwrap(), 1e-3).unwrap();
        // h(t, x) = exp(−∫_t^1 e^r dr)
        let t: f64 = 0.25;
        let want = -(1f64.exp() - t.exp());
        assert!((h.log_h(t, 3).unwrap() - want).abs() < 1e-10);
        assert_eq!(h.bridge_intensity(&model, t, 3).unwrap(), 0.0);
    }

    #[test]
    fn pinning_divergence_has_unit_log_log_slope() {
        let model = IntensityModel::<f64>::product(1.0, 3.0, 0.1).unwrap();
        let h = HField::solve(&model, &BridgeSpec::unit(0, 4).unwrap(), 1e-3).unwrap();
        let a = 0.1;
        let b = 1e-4;
        let ka = h.bridge_intensity(&model, 1.0 - a, 3).unwrap();
        let kb = h.bridge_intensity(&model, 1.0 - b, 3).unwrap();
        let slope = (kb.ln() - ka.ln()) / (b.ln() - a.ln());
        assert!((slope + 1.0).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn intensity_finite_inside_last_cell() {
        let model = IntensityModel::<f64>::poisson(1.0).unwrap();
        let spec = BridgeSpec::unit(0, 3).unwrap();
        let h = HField::solve(&model, &spec, 1e-3).unwrap();
        let t = 1.0 - 3e-6;
        let k = h.bridge_intensity(&model, t, 2).unwrap();
        assert!((k * 3e-6 - 1.0).abs() < 1e-3, "{k}");
    }

    #[test]
    fn step_errors() {
        let model = IntensityModel::<f64>::poisson(1.0).unwrap();
        let spec = BridgeSpec::new(0, 2, 0.0, 0.005).unwrap();
        assert!(matches!(HField::solve(&model, &spec, 0.01), Err(Error::BadStep { .. })));
        let spec = BridgeSpec::unit(0, 2).unwrap();
        assert!(matches!(HField::solve(&model, &spec, 0.0), Err(Error::BadStep { .. })));
        assert!(matches!(HField::solve(&model, &spec, 0.05), Err(Error::BadStep { .. })));
    }

    #[test]
    fn queries_outside_window_fail() {
        let model = IntensityModel::<f64>::poisson(1.0).unwrap();
        let h = HField::solve(&model, &BridgeSpec::new(1, 3, 0.2, 0.8).unwrap(), 1e-3).unwrap();
        assert!(h.bridge_intensity(&model, 0.1, 1).is_err());
        assert!(h.bridge_intensity(&model, 0.8, 1).is_err());
        assert!(h.bridge_intensity(&model, 0.5, 0).is_err());
    }
}
