//! Rejection sampler for the jump-time density `exp(ξ)`, proposing from the
//! constant-characteristic law at the infimum of Ξ.

use rand::Rng;
use rayon::prelude::*;

use super::constant::constant_variates;
use super::xi::XiPotential;
use super::{replica_rng, PathSample};
use crate::error::{Error, Result};
use crate::intensity::{IntensityModel, DEFAULT_BOUNDS_STEP};
use crate::scalar::Scalar;

pub const REJECTION_MAX_N: u64 = 20;
/// Proposals per replica before the run is abandoned.
pub const MAX_PROPOSALS: u64 = 10_000_000;

#[derive(Debug, Clone)]
pub struct RejectionRun<T> {
    pub paths: Vec<PathSample<T>>,
    pub lambda_hat: T,
    pub proposals: u64,
}

impl<T> RejectionRun<T> {
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            1.0
        } else {
            self.paths.len() as f64 / self.proposals as f64
        }
    }
}

/// Samples the bridge jump times by proposing order statistics of the
/// `Ξ ≡ λ̂` bridge and accepting with `exp(ξ(𝐭) − λ̂Σt_j − M)`.
pub fn sample_rejection<T: Scalar>(
    model: &IntensityModel<T>,
    pot: &XiPotential<T>,
    count: usize,
    seed: u64,
) -> Result<RejectionRun<T>> {
    let spec = *pot.spec();
    let n = spec.height();
    if n > REJECTION_MAX_N {
        return Err(Error::RejectionScale { n, max: REJECTION_MAX_N });
    }
    if n == 0 {
        return Ok(RejectionRun {
            paths: vec![PathSample { x0: spec.x, jump_times: vec![] }; count],
            lambda_hat: T::zero(),
            proposals: count as u64,
        });
    }
    let bounds = model.characteristic_bounds(
        spec.s,
        spec.u,
        spec.x as i64,
        spec.y as i64 - 1,
        T::lit(DEFAULT_BOUNDS_STEP),
    )?;
    let lam = bounds.inf;
    // ξ_j(t) − λ̂t is nondecreasing, so its value at u bounds the exponent
    let tilt = |j: usize, t: T| pot.xi(j, t) - lam * t;
    let top: T = (1..=n as usize).map(|j| tilt(j, spec.u)).sum();
    let results: Vec<(PathSample<T>, u64)> = (0..count)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r as u64);
            for tries in 1..=MAX_PROPOSALS {
                let mut times = constant_variates(lam, &spec, &mut rng);
                times.sort_by(|a, b| a.partial_cmp(b).expect("finite jump times"));
                let log_acc: T = times.iter().enumerate().map(|(j, &t)| tilt(j + 1, t)).sum::<T>() - top;
                if rng.random::<f64>().ln() < log_acc.as_f64() {
                    return Ok((PathSample { x0: spec.x, jump_times: times }, tries));
                }
            }
            Err(Error::ResourceCap { requested: MAX_PROPOSALS + 1, cap: MAX_PROPOSALS })
        })
        .collect::<Result<_>>()?;
    let proposals = results.iter().map(|(_, k)| k).sum();
    Ok(RejectionRun { paths: results.into_iter().map(|(p, _)| p).collect(), lambda_hat: lam, proposals })
}
