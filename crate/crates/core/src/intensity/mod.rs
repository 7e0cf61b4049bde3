//! Jump intensities ℓ(t, z) of Markov counting processes and their
//! reciprocal characteristic
//!
//! ```text
//! Ξ(t, z) = ∂_t log ℓ(t, z) + ℓ(t, z+1) − ℓ(t, z)
//! ```
//!
//! Time lives in `[0, 1]`; states are integers `z ≥ state_floor`.
//! Three parametric families have a constant characteristic (Poisson,
//! space-linear, time-exponential), `Product` has a time-varying one, and
//! `Tabulated` covers arbitrary user intensities on a grid.

mod descriptor;
mod field;
mod tabulated;

pub use descriptor::{FamilyName, ModelDescriptor};
pub use field::CharacteristicField;
pub use tabulated::{DerivativeSource, Table};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default grid step used by [`IntensityModel::characteristic_bounds`].
pub const DEFAULT_BOUNDS_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub enum Family<T> {
    /// ℓ = α.
    Poisson { alpha: T },
    /// ℓ = λ z + α.
    SpaceLinear { lambda: T, alpha: T },
    /// ℓ = α e^{λ t}.
    TimeExponential { alpha: T, lambda: T },
    /// ℓ = α e^{λ t} (1 + β z).
    Product { alpha: T, lambda: T, beta: T },
    Tabulated(Table<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntensityModel<T> {
    family: Family<T>,
    state_floor: u64,
}

/// Grid (or exact) extrema of the characteristic over a window × state range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharBounds<T> {
    pub inf: T,
    pub sup: T,
    /// `true` when the extrema come from the closed form of a parametric
    /// family; `false` for grid scans, which are not certified bounds.
    pub exact: bool,
}

impl<T: Scalar> IntensityModel<T> {
    pub fn new(family: Family<T>, state_floor: u64) -> Result<Self> {
        let positive = |name: &str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidModel(format!("{name} must be finite and > 0, got {v}")))
            }
        };
        let finite = |name: &str, v: T| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidModel(format!("{name} must be finite")))
            }
        };
        match &family {
            Family::Poisson { alpha } => positive("alpha", *alpha)?,
            Family::SpaceLinear { lambda, alpha } => {
                finite("lambda", *lambda)?;
                positive("alpha", *alpha)?;
            }
            Family::TimeExponential { alpha, lambda } => {
                positive("alpha", *alpha)?;
                finite("lambda", *lambda)?;
            }
            Family::Product { alpha, lambda, beta } => {
                positive("alpha", *alpha)?;
                finite("lambda", *lambda)?;
                finite("beta", *beta)?;
            }
            Family::Tabulated(table) => {
                if table.z_min() < state_floor {
                    return Err(Error::InvalidModel(format!(
                        "table starts at z={} below state_floor={state_floor}",
                        table.z_min()
                    )));
                }
            }
        }
        Ok(Self { family, state_floor })
    }

    pub fn poisson(alpha: T) -> Result<Self> {
        Self::new(Family::Poisson { alpha }, 0)
    }

    pub fn space_linear(lambda: T, alpha: T) -> Result<Self> {
        Self::new(Family::SpaceLinear { lambda, alpha }, 0)
    }

    pub fn time_exponential(alpha: T, lambda: T) -> Result<Self> {
        Self::new(Family::TimeExponential { alpha, lambda }, 0)
    }

    pub fn product(alpha: T, lambda: T, beta: T) -> Result<Self> {
        Self::new(Family::Product { alpha, lambda, beta }, 0)
    }

    pub fn tabulated(table: Table<T>) -> Result<Self> {
        let floor = table.z_min();
        Self::new(Family::Tabulated(table), floor)
    }

    pub fn family(&self) -> &Family<T> {
        &self.family
    }

    pub fn state_floor(&self) -> u64 {
        self.state_floor
    }

    /// `true` for the closed-form families.
    pub fn is_parametric(&self) -> bool {
        !matches!(self.family, Family::Tabulated(_))
    }

    /// The constant value of Ξ when the family has one.
    pub fn constant_characteristic(&self) -> Option<T> {
        match &self.family {
            Family::Poisson { .. } => Some(T::zero()),
            Family::SpaceLinear { lambda, .. } | Family::TimeExponential { lambda, .. } => {
                Some(*lambda)
            }
            Family::Product { beta, lambda, .. } if beta.is_zero() => Some(*lambda),
            _ => None,
        }
    }

    fn check_domain(&self, t: T, z: u64) -> Result<()> {
        if !(t >= T::zero() && t <= T::one()) {
            return Err(Error::OutOfDomain(format!("t={t} outside [0, 1]")));
        }
        if z < self.state_floor {
            return Err(Error::OutOfDomain(format!(
                "z={z} below state_floor={}",
                self.state_floor
            )));
        }
        Ok(())
    }

    /// ℓ(t, z).
    pub fn eval(&self, t: T, z: u64) -> Result<T> {
        self.check_domain(t, z)?;
        let zf = T::from_u64(z);
        Ok(match &self.family {
            Family::Poisson { alpha } => *alpha,
            Family::SpaceLinear { lambda, alpha } => *lambda * zf + *alpha,
            Family::TimeExponential { alpha, lambda } => *alpha * (*lambda * t).exp(),
            Family::Product { alpha, lambda, beta } => {
                *alpha * (*lambda * t).exp() * (T::one() + *beta * zf)
            }
            Family::Tabulated(table) => table.value(t, z)?,
        })
    }

    /// ∂_t ℓ(t, z).
    pub fn eval_dt(&self, t: T, z: u64) -> Result<T> {
        self.check_domain(t, z)?;
        let zf = T::from_u64(z);
        Ok(match &self.family {
            Family::Poisson { .. } | Family::SpaceLinear { .. } => T::zero(),
            Family::TimeExponential { alpha, lambda } => *alpha * *lambda * (*lambda * t).exp(),
            Family::Product { alpha, lambda, beta } => {
                *alpha * *lambda * (*lambda * t).exp() * (T::one() + *beta * zf)
            }
            Family::Tabulated(table) => table.derivative(t, z)?,
        })
    }

    /// Ξ(t, z), using the closed form where one exists.
    pub fn characteristic(&self, t: T, z: u64) -> Result<T> {
        self.check_domain(t, z)?;
        match &self.family {
            Family::Poisson { .. } => Ok(T::zero()),
            Family::SpaceLinear { lambda, .. } | Family::TimeExponential { lambda, .. } => {
                Ok(*lambda)
            }
            Family::Product { alpha, lambda, beta } => {
                Ok(*lambda + *alpha * (*lambda * t).exp() * *beta)
            }
            Family::Tabulated(_) => self.characteristic_generic(t, z),
        }
    }

    /// Ξ(t, z) assembled from [`eval`](Self::eval) and [`eval_dt`](Self::eval_dt).
    pub fn characteristic_generic(&self, t: T, z: u64) -> Result<T> {
        let rate = self.eval(t, z)?;
        if rate.is_zero() {
            return Ok(T::zero());
        }
        let next = self.eval(t, z + 1)?;
        Ok(self.eval_dt(t, z)? / rate + next - rate)
    }

    /// Infimum and supremum of Ξ over `[s, u] × {z_lo..=z_hi}`.
    ///
    /// Parametric families use their exact structure; tabulated models are
    /// scanned on a grid of spacing `step` (grid bounds, not certified).
    pub fn characteristic_bounds(
        &self,
        s: T,
        u: T,
        z_lo: i64,
        z_hi: i64,
        step: T,
    ) -> Result<CharBounds<T>> {
        if z_lo > z_hi || z_hi < 0 {
            return Err(Error::EmptyRange { lo: z_lo, hi: z_hi });
        }
        if !(s < u) {
            return Err(Error::BadWindow(format!("s={s} must be < u={u}")));
        }
        let lo = z_lo.max(0) as u64;
        let hi = z_hi as u64;
        self.check_domain(s, lo)?;
        self.check_domain(u, hi)?;
        if let Some(c) = self.constant_characteristic() {
            return Ok(CharBounds { inf: c, sup: c, exact: true });
        }
        if let Family::Product { .. } = self.family {
            // Ξ = λ + αβ e^{λt}: z-free and monotone in t.
            let a = self.characteristic(s, lo)?;
            let b = self.characteristic(u, lo)?;
            return Ok(CharBounds { inf: a.min(b), sup: a.max(b), exact: true });
        }
        let n_steps = ((u - s) / step).ceil().to_usize().unwrap_or(1).max(1);
        let mut inf = T::infinity();
        let mut sup = T::neg_infinity();
        for k in 0..=n_steps {
            let t = if k == n_steps {
                u
            } else {
                s + (u - s) * T::from_usize(k) / T::from_usize(n_steps)
            };
            for z in lo..=hi {
                let c = self.characteristic(t, z)?;
                inf = inf.min(c);
                sup = sup.max(c);
            }
        }
        Ok(CharBounds { inf, sup, exact: false })
    }

    /// Checks ℓ > 0 on `[0, 1] × {z_lo..=z_hi}`.
    pub fn check_positive(&self, z_lo: u64, z_hi: u64) -> Result<()> {
        let probe = |t: T, z: u64| -> Result<()> {
            let v = self.eval(t, z)?;
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::NonPositiveRate { t: t.as_f64(), z })
            }
        };
        match &self.family {
            Family::Poisson { .. } | Family::TimeExponential { .. } => probe(T::zero(), z_lo),
            Family::SpaceLinear { .. } | Family::Product { .. } => {
                // affine in z at fixed t, and the time factor is positive
                probe(T::zero(), z_lo)?;
                probe(T::zero(), z_hi)
            }
            Family::Tabulated(table) => {
                for &t in table.t_grid() {
                    for z in z_lo..=z_hi {
                        probe(t, z)?;
                    }
                }
                let n = 1000;
                for k in 0..=n {
                    let t = T::from_usize(k) / T::from_usize(n);
                    for z in z_lo..=z_hi {
                        probe(t, z)?;
                    }
                }
                Ok(())
            }
        }
    }

    /// Range of z ↦ ℓ(t, z+1) − ℓ(t, z) on the tabulated nodes; closed form
    /// for parametric families (over `t ∈ [0, 1]`).
    pub fn increment_bounds(&self) -> (T, T) {
        match &self.family {
            Family::Poisson { .. } | Family::TimeExponential { .. } => (T::zero(), T::zero()),
            Family::SpaceLinear { lambda, .. } => (*lambda, *lambda),
            Family::Product { alpha, lambda, beta } => {
                let a = *alpha * *beta;
                let b = *alpha * *beta * lambda.exp();
                (a.min(b), a.max(b))
            }
            Family::Tabulated(table) => table.increment_bounds(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn families() -> Vec<IntensityModel<f64>> {
        vec![
            IntensityModel::poisson(2.0).unwrap(),
            IntensityModel::space_linear(1.0, 0.5).unwrap(),
            IntensityModel::time_exponential(1.0, 3.0).unwrap(),
            IntensityModel::time_exponential(0.7, -2.0).unwrap(),
            IntensityModel::product(1.0, 3.0, 0.1).unwrap(),
            IntensityModel::product(2.0, -1.0, 0.4).unwrap(),
        ]
    }

    #[test]
    fn eval_examples() {
        let p = IntensityModel::poisson(2.0).unwrap();
        assert_eq!(p.eval(0.3, 7).unwrap(), 2.0);
        let sl = IntensityModel::space_linear(1.0, 0.5).unwrap();
        assert_eq!(sl.eval(0.9, 3).unwrap(), 3.5);
        let te = IntensityModel::time_exponential(1.0, 3.0).unwrap();
        assert_relative_eq!(te.eval(0.5, 0).unwrap(), 4.481_689_070_338_065, max_relative = 1e-14);
    }

    #[test]
    fn eval_domain_errors() {
        let p = IntensityModel::poisson(2.0).unwrap();
        assert!(matches!(p.eval(1.5, 0), Err(Error::OutOfDomain(_))));
        assert!(matches!(p.eval(-0.1, 0), Err(Error::OutOfDomain(_))));
        let floored = IntensityModel::new(Family::Poisson { alpha: 1.0 }, 3).unwrap();
        assert!(matches!(floored.eval(0.5, 2), Err(Error::OutOfDomain(_))));
        assert!(IntensityModel::poisson(0.0).is_err());
    }

    #[test]
    fn characteristic_examples() {
        let p = IntensityModel::poisson(5.0).unwrap();
        assert_eq!(p.characteristic(0.2, 9).unwrap(), 0.0);
        let sl = IntensityModel::space_linear(2.0, 1.0).unwrap();
        assert_eq!(sl.characteristic(0.4, 6).unwrap(), 2.0);
        let pr = IntensityModel::product(1.0, 3.0, 0.1).unwrap();
        assert_relative_eq!(
            pr.characteristic(0.5, 2).unwrap(),
            3.448_168_907_033_806,
            max_relative = 1e-14
        );
    }

    #[test]
    fn bounds_examples() {
        let p = IntensityModel::poisson(1.0).unwrap();
        let b = p.characteristic_bounds(0.0, 1.0, 0, 9, 1e-3).unwrap();
        assert_eq!((b.inf, b.sup), (0.0, 0.0));
        let te = IntensityModel::time_exponential(1.0, -3.0).unwrap();
        let b = te.characteristic_bounds(0.0, 1.0, 0, 19, 1e-3).unwrap();
        assert_eq!((b.inf, b.sup), (-3.0, -3.0));
        let pr = IntensityModel::product(1.0, 3.0, 0.1).unwrap();
        let b = pr.characteristic_bounds(0.0, 1.0, 0, 4, 1e-3).unwrap();
        assert_relative_eq!(b.inf, 3.1, max_relative = 1e-14);
        assert_relative_eq!(b.sup, 5.008_553_692_318_767, max_relative = 1e-14);
        assert!(b.exact);
        assert!(matches!(
            pr.characteristic_bounds(0.0, 1.0, 3, 2, 1e-3),
            Err(Error::EmptyRange { .. })
        ));
    }

    #[test]
    fn closed_form_characteristic_matches_generic() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for m in families() {
            for _ in 0..100 {
                let t: f64 = rng.random();
                let z: u64 = rng.random_range(0..30);
                let a = m.characteristic(t, z).unwrap();
                let b = m.characteristic_generic(t, z).unwrap();
                assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "{m:?} t={t} z={z}");
            }
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let h = 1e-5;
        for m in families() {
            for i in 0..50 {
                let t = 1e-5 + (1.0 - 2e-5) * i as f64 / 49.0;
                for z in 0..10 {
                    let d = m.eval_dt(t, z).unwrap();
                    let fd = (m.eval(t + h, z).unwrap() - m.eval(t - h, z).unwrap()) / (2.0 * h);
                    assert!((d - fd).abs() <= 1e-4 * (1.0 + d.abs()), "{m:?} t={t} z={z}");
                }
            }
        }
    }

    #[test]
    fn every_poisson_rate_has_zero_characteristic() {
        for alpha in [0.1, 1.0, 10.0] {
            let m = IntensityModel::poisson(alpha).unwrap();
            for i in 0..=10 {
                let t = i as f64 / 10.0;
                for z in 0..20 {
                    assert_eq!(m.characteristic_generic(t, z).unwrap(), 0.0);
                }
            }
        }
    }

    #[test]
    fn positivity_checks() {
        let sl = IntensityModel::space_linear(-3.0, 10.0).unwrap();
        assert!(sl.check_positive(0, 3).is_ok());
        assert!(matches!(sl.check_positive(0, 4), Err(Error::NonPositiveRate { .. })));
    }

    #[test]
    fn generic_over_f32() {
        let m = IntensityModel::<f32>::product(1.0, 3.0, 0.1).unwrap();
        let c = m.characteristic(0.5, 2).unwrap();
        assert!((c - 3.448_169).abs() < 1e-5);
    }
}
