//! Bridges of Markov counting processes.
//!
//! * [`intensity`]: jump intensities ℓ(t, z) and the reciprocal
//!   characteristic Ξ.
//! * [`analytic`]: closed forms for constant characteristics (π_λ,
//!   binomial marginals, mean bounds).
//! * [`engine`]: h-function, bridge intensity and marginal tables for any
//!   intensity.
//! * [`sampler`]: jump-time simplex density, quadrature oracle and exact,
//!   rejection and thinning samplers.
//! * [`verify`]: executable checks of convexity, binomial dominance, mean
//!   bounds, the duality formula and the law of large numbers.
//! * [`cli`]: the `cbridge` command-line front end.
//!
//! The numerical core is generic over [`Scalar`] (`f64`, `f32`); the
//! aliases below fix it to `f64`.

// NaN-rejecting guards are written as `!(a < b)` on purpose; the RK4
// kernels index several parallel arrays by one loop counter.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analytic;
pub mod cli;
pub mod engine;
pub mod error;
pub mod intensity;
pub mod io;
pub mod sampler;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Intensity = intensity::IntensityModel<f64>;
pub type Bridge = engine::BridgeSpec<f64>;
pub type Binomial = analytic::BinomialSpec<f64>;
pub type HFunction = engine::HField<f64>;
pub type Marginals = engine::MarginalTable<f64>;
