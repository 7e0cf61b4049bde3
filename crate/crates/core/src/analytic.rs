//! Closed forms for processes with a constant reciprocal characteristic λ.
//!
//! The per-jump time profile is
//! `π_λ(t) = (e^{λt} − 1) / (e^λ − 1)`, and the one-time marginal of an
//! `x → y` bridge is `x + Binomial(y − x, π_λ(t))`.

use crate::engine::BridgeSpec;
use crate::error::{Error, Result};
use crate::scalar::{ln_choose, Scalar};

const SERIES_CUTOFF: f64 = 1e-6;

/// `π_λ(t)`, with the continuous extension `π_0(t) = t`.
pub fn pi_lambda<T: Scalar>(lambda: T, t: T) -> T {
    if lambda.is_zero() {
        return t;
    }
    if lambda.abs() < T::lit(SERIES_CUTOFF) {
        return t + lambda * t * (t - T::one()) / T::lit(2.0);
    }
    if lambda > T::zero() {
        // e^{λ(t−1)} (1 − e^{−λt}) / (1 − e^{−λ}) never overflows
        (lambda * (t - T::one())).exp() * (-lambda * t).exp_m1() / (-lambda).exp_m1()
    } else {
        (lambda * t).exp_m1() / lambda.exp_m1()
    }
}

/// Inverse of `t ↦ π_λ(t)` on `[0, 1]`.
pub fn pi_inverse<T: Scalar>(lambda: T, p: T) -> T {
    if lambda.abs() < T::lit(1e-12) {
        return p;
    }
    if lambda > T::zero() {
        T::one() + (p + (T::one() - p) * (-lambda).exp()).ln() / lambda
    } else {
        (p * lambda.exp_m1()).ln_1p() / lambda
    }
}

/// `π^{s,u}_λ(t) = (e^{λ(t−s)} − 1) / (e^{λ(u−s)} − 1)`.
pub fn pi_shifted<T: Scalar>(lambda: T, s: T, u: T, t: T) -> Result<T> {
    if !(s >= T::zero() && s < u && u <= T::one()) {
        return Err(Error::BadWindow(format!("need 0 <= s < u <= 1, got s={s}, u={u}")));
    }
    if !(t >= s && t <= u) {
        return Err(Error::BadWindow(format!("t={t} outside [{s}, {u}]")));
    }
    let len = u - s;
    Ok(pi_lambda(lambda * len, ((t - s) / len).min(T::one())))
}

/// Binomial law 𝓑_{n,p}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinomialSpec<T> {
    pub n: u64,
    pub p: T,
}

impl<T: Scalar> BinomialSpec<T> {
    pub fn new(n: u64, p: T) -> Result<Self> {
        if !(p >= T::zero() && p <= T::one()) {
            return Err(Error::InvalidInput(format!("binomial p={p} outside [0, 1]")));
        }
        Ok(Self { n, p })
    }

    pub fn pmf(&self, k: u64) -> T {
        if k > self.n {
            return T::zero();
        }
        if self.p.is_zero() {
            return if k == 0 { T::one() } else { T::zero() };
        }
        if self.p == T::one() {
            return if k == self.n { T::one() } else { T::zero() };
        }
        let kf = T::from_u64(k);
        let rest = T::from_u64(self.n - k);
        (ln_choose::<T>(self.n, k) + kf * self.p.ln() + rest * (-self.p).ln_1p()).exp()
    }

    pub fn pmf_vec(&self) -> Vec<T> {
        (0..=self.n).map(|k| self.pmf(k)).collect()
    }

    pub fn mean(&self) -> T {
        T::from_u64(self.n) * self.p
    }

    /// `P(K ≥ i)`.
    pub fn tail(&self, i: u64) -> Result<T> {
        if i > self.n {
            return Err(Error::IndexOut { i, n: self.n });
        }
        if i == 0 {
            return Ok(T::one());
        }
        if T::from_u64(i) > self.mean() {
            Ok(self.upper_sum(i))
        } else {
            Ok((T::one() - self.lower_sum(i)).max(T::zero()))
        }
    }

    /// `P(K < i)`, the complement of [`tail`](Self::tail) summed on its own
    /// side so both stay accurate when one of them is close to 1.
    pub fn lower_tail(&self, i: u64) -> Result<T> {
        if i > self.n {
            return Err(Error::IndexOut { i, n: self.n });
        }
        if i == 0 {
            return Ok(T::zero());
        }
        if T::from_u64(i) > self.mean() {
            Ok((T::one() - self.upper_sum(i)).max(T::zero()))
        } else {
            Ok(self.lower_sum(i))
        }
    }

    fn upper_sum(&self, i: u64) -> T {
        (i..=self.n).rev().map(|k| self.pmf(k)).sum()
    }

    fn lower_sum(&self, i: u64) -> T {
        (0..i).map(|k| self.pmf(k)).sum()
    }
}

/// `𝓑_{n,p}({i, …, n})`.
pub fn binomial_tail<T: Scalar>(spec: &BinomialSpec<T>, i: u64) -> Result<T> {
    spec.tail(i)
}

/// Exact one-time marginal of `X_t − x` for a bridge whose characteristic
/// is identically `lambda` on the ladder.
pub fn constant_char_marginal<T: Scalar>(
    spec: &BridgeSpec<T>,
    lambda: T,
    t: T,
) -> Result<BinomialSpec<T>> {
    spec.validate()?;
    BinomialSpec::new(spec.height(), pi_shifted(lambda, spec.s, spec.u, t)?)
}

/// `x + (y − x) π^{s,u}_λ(t)`: the mean of the constant-λ bridge, an upper
/// bound on the bridge mean whenever λ bounds Ξ from below.
pub fn mean_bound<T: Scalar>(spec: &BridgeSpec<T>, lambda: T, t: T) -> Result<T> {
    spec.validate()?;
    let p = pi_shifted(lambda, spec.s, spec.u, t)?;
    Ok(T::from_u64(spec.x) + T::from_u64(spec.height()) * p)
}
