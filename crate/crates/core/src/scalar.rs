//! Scalar abstraction shared by every numerical module.
//!
//! The math is written once against [`Scalar`] and instantiated for `f64`
//! (the default used by the CLI and the Monte Carlo layer) or `f32`.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, NumCast};

pub trait Scalar:
    Float
    + FloatConst
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + 'static
{
    /// Converts an `f64` literal; every supported scalar can represent one.
    fn lit(v: f64) -> Self {
        <Self as NumCast>::from(v).expect("f64 literal representable in scalar type")
    }

    fn from_u64(v: u64) -> Self {
        <Self as NumCast>::from(v).expect("integer representable in scalar type")
    }

    fn from_usize(v: usize) -> Self {
        <Self as NumCast>::from(v).expect("integer representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function (Lanczos, g = 7) for `x > 0`.
pub fn ln_gamma<T: Scalar>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        let pi = T::PI();
        return (pi / (pi * x).sin()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::lit(LANCZOS_COEF[0]);
    for (k, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += T::lit(*c) / (x + T::from_usize(k));
    }
    let t = x + T::lit(LANCZOS_G) + half;
    half * (T::TAU()).ln() + (x + half) * t.ln() - t + acc.ln()
}

/// `ln C(n, k)`; exact small-factorial path for `n ≤ 20`.
pub fn ln_choose<T: Scalar>(n: u64, k: u64) -> T {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    if n <= 20 {
        let mut c: u64 = 1;
        for j in 0..k {
            c = c * (n - j) / (j + 1);
        }
        return T::from_u64(c).ln();
    }
    ln_gamma(T::from_u64(n + 1)) - ln_gamma(T::from_u64(k + 1)) - ln_gamma(T::from_u64(n - k + 1))
}

/// `ln(n!)`.
pub fn ln_factorial<T: Scalar>(n: u64) -> T {
    if n <= 20 {
        let mut f: u64 = 1;
        for j in 2..=n {
            f *= j;
        }
        return T::from_u64(f).ln();
    }
    ln_gamma(T::from_u64(n + 1))
}
