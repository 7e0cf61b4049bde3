//! Brute-force marginals of the jump-time law by iterated quadrature over
//! the ordered simplex, for small heights.

use super::quadrature::integrate;
use super::xi::XiPotential;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest height the quadrature oracle accepts.
pub const ORACLE_MAX_N: u64 = 4;
/// Relative tolerance of every one-dimensional quadrature.
pub const ORACLE_TOL: f64 = 1e-8;

struct Nested<'a, T> {
    pot: &'a XiPotential<T>,
    caps: Vec<T>,
    shift: Vec<T>,
    tol: T,
}

impl<T: Scalar> Nested<'_, T> {
    /// ∫ over `lower < t_j < … < t_n`, with `t_k < caps[k]`.
    fn level(&self, j: usize, lower: T) -> T {
        let n = self.caps.len();
        let upper = self.caps[j];
        if !(lower < upper) {
            return T::zero();
        }
        integrate(
            |tj| {
                let w = (self.pot.xi(j + 1, tj) - self.shift[j]).exp();
                if j + 1 < n {
                    w * self.level(j + 1, tj)
                } else {
                    w
                }
            },
            lower,
            upper,
            self.tol,
            T::zero(),
        )
    }
}

fn nested<T: Scalar>(pot: &XiPotential<T>, caps: Vec<T>) -> T {
    let n = pot.height();
    let shift = (1..=n).map(|j| pot.table(j).iter().copied().fold(T::neg_infinity(), T::max)).collect();
    let job = Nested { pot, caps, shift, tol: T::lit(ORACLE_TOL) };
    job.level(0, pot.spec().s)
}

fn check_scale<T: Scalar>(pot: &XiPotential<T>) -> Result<()> {
    let n = pot.height() as u64;
    if n > ORACLE_MAX_N {
        return Err(Error::OracleScale { n, max: ORACLE_MAX_N });
    }
    Ok(())
}

/// `P(T_i ≤ t) = P(X_t ≥ x + i)` from the normalized simplex density.
pub fn simplex_oracle_marginal<T: Scalar>(pot: &XiPotential<T>, t: T, i: u64) -> Result<T> {
    check_scale(pot)?;
    let n = pot.height();
    if i == 0 || i as usize > n {
        return Err(Error::IndexOut { i, n: n as u64 });
    }
    let spec = *pot.spec();
    if !spec.contains_time(t) {
        return Err(Error::OutOfDomain(format!("t={t} outside [{}, {}]", spec.s, spec.u)));
    }
    let full = nested(pot, vec![spec.u; n]);
    let caps = (0..n).map(|k| if k < i as usize { t } else { spec.u }).collect();
    Ok((nested(pot, caps) / full).min(T::one()))
}

/// `log Z`, the log-volume of `exp(ξ)` over the ordered simplex.
pub fn simplex_log_normalizer<T: Scalar>(pot: &XiPotential<T>) -> Result<T> {
    check_scale(pot)?;
    let n = pot.height();
    let spec = *pot.spec();
    let shift: T = (1..=n).map(|j| pot.table(j).iter().copied().fold(T::neg_infinity(), T::max)).sum();
    Ok(nested(pot, vec![spec.u; n]).ln() + shift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{binomial_tail, constant_char_marginal};
    use crate::engine::BridgeSpec;
    use crate::intensity::IntensityModel;
    use crate::sampler::xi_tables;

    #[test]
    fn poisson_two_jumps() {
        let m = IntensityModel::<f64>::poisson(1.0).unwrap();
        let pot = xi_tables(&m, &BridgeSpec::unit(0, 2).unwrap(), 1e-4).unwrap();
        assert!((simplex_oracle_marginal(&pot, 0.5, 1).unwrap() - 0.75).abs() < 1e-10);
        // volume of the ordered 2-simplex
        assert!((simplex_log_normalizer(&pot).unwrap() - 0.5f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn constant_three_matches_binomial() {
        let m = IntensityModel::<f64>::space_linear(3.0, 1.0).unwrap();
        let spec = BridgeSpec::unit(0, 3).unwrap();
        let pot = xi_tables(&m, &spec, 1e-4).unwrap();
        let got = simplex_oracle_marginal(&pot, 0.5, 2).unwrap();
        assert!((got - 0.087_695_311_021_603_67).abs() < 1e-6, "{got}");
        let b = constant_char_marginal(&spec, 3.0, 0.5).unwrap();
        assert!((got - binomial_tail(&b, 2).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn product_is_dominated() {
        let spec = BridgeSpec::unit(0, 3).unwrap();
        let prod = xi_tables(&IntensityModel::<f64>::product(1.0, 3.0, 0.1).unwrap(), &spec, 1e-4).unwrap();
        let flat = xi_tables(&IntensityModel::<f64>::space_linear(3.0, 1.0).unwrap(), &spec, 1e-4).unwrap();
        let a = simplex_oracle_marginal(&prod, 0.5, 1).unwrap();
        let b = simplex_oracle_marginal(&flat, 0.5, 1).unwrap();
        assert!(a < b, "{a} vs {b}");
    }

    #[test]
    fn scale_and_index_errors() {
        let m = IntensityModel::<f64>::poisson(1.0).unwrap();
        let pot = xi_tables(&m, &BridgeSpec::unit(0, 5).unwrap(), 1e-3).unwrap();
        assert!(matches!(simplex_oracle_marginal(&pot, 0.5, 1), Err(Error::OracleScale { n: 5, .. })));
        let pot = xi_tables(&m, &BridgeSpec::unit(0, 2).unwrap(), 1e-3).unwrap();
        assert!(matches!(simplex_oracle_marginal(&pot, 0.5, 3), Err(Error::IndexOut { .. })));
        assert!(matches!(simplex_oracle_marginal(&pot, 0.5, 0), Err(Error::IndexOut { .. })));
    }
}
