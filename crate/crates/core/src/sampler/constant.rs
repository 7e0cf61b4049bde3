//! Exact sampler for bridges with a constant characteristic λ: the jump
//! times are the order statistics of `n` i.i.d. variates with density
//! proportional to `e^{λt}` on the window.

use rand::Rng;
use rayon::prelude::*;

use super::{replica_rng, PathSample};
use crate::analytic::pi_inverse;
use crate::engine::BridgeSpec;
use crate::error::Result;
use crate::scalar::Scalar;

/// Unsorted i.i.d. jump-time variates on `(s, u)`.
pub fn constant_variates<T: Scalar, R: Rng>(lambda: T, spec: &BridgeSpec<T>, rng: &mut R) -> Vec<T> {
    let len = spec.length();
    let scaled = lambda * len;
    (0..spec.height())
        .map(|_| {
            // U in (0, 1) keeps the variate off the window ends
            let u: f64 = loop {
                let v = rng.random::<f64>();
                if v > 0.0 {
                    break v;
                }
            };
            let t = spec.s + len * pi_inverse(scaled, T::lit(u));
            t.max(spec.s).min(spec.u)
        })
        .collect()
}

/// `count` exact bridge paths for `Ξ ≡ lambda`, replica `r` drawn from
/// stream `r` of `seed`.
pub fn sample_constant<T: Scalar>(
    lambda: T,
    spec: &BridgeSpec<T>,
    count: usize,
    seed: u64,
) -> Result<Vec<PathSample<T>>> {
    spec.validate()?;
    Ok((0..count)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r as u64);
            let mut times = constant_variates(lambda, spec, &mut rng);
            times.sort_by(|a, b| a.partial_cmp(b).expect("finite jump times"));
            PathSample { x0: spec.x, jump_times: times }
        })
        .collect())
}
