//! Thinning sampler for the h-transformed bridge intensity.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{replica_rng, PathSample};
use crate::engine::HField;
use crate::error::{Error, Result};
use crate::intensity::IntensityModel;
use crate::scalar::Scalar;

/// Widest cell covered by one constant majorant.
pub const MAJORANT_WINDOW: f64 = 0.01;
/// Paths stop this far before the pin.
pub const PIN_GAP: f64 = 1e-9;
/// Breaches tolerated per path before giving up.
pub const MAX_REFRESHES: usize = 100;

const PROBES: usize = 16;
const SAFETY: f64 = 1.5;

/// Counters accumulated over all replicas of a thinning run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ThinningStats {
    pub candidates: u64,
    pub accepted: u64,
    pub windows: u64,
    pub breaches: u64,
}

impl ThinningStats {
    fn merge(mut self, o: Self) -> Self {
        self.candidates += o.candidates;
        self.accepted += o.accepted;
        self.windows += o.windows;
        self.breaches += o.breaches;
        self
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.candidates == 0 {
            1.0
        } else {
            self.accepted as f64 / self.candidates as f64
        }
    }
}

#[derive(Debug, Clone)]
pub struct ThinningRun<T> {
    pub paths: Vec<PathSample<T>>,
    pub stats: ThinningStats,
}

/// Cell boundaries: uniform cells of width at most [`MAJORANT_WINDOW`], then
/// cells halving in length toward the pin, ending at `u − PIN_GAP`.
fn cell_edges<T: Scalar>(s: T, u: T) -> Vec<T> {
    let gap = T::lit(PIN_GAP).max(T::epsilon() * T::lit(4.0));
    let tail = T::lit(MAJORANT_WINDOW).min((u - s) / T::lit(2.0));
    let body = (u - tail) - s;
    let cells = (body / T::lit(MAJORANT_WINDOW)).ceil().to_usize().unwrap_or(0).max(1);
    let mut edges: Vec<T> = (0..cells).map(|k| s + body * T::from_usize(k) / T::from_usize(cells)).collect();
    let mut d = tail;
    while d > gap {
        edges.push(u - d);
        d = d / T::lit(2.0);
    }
    edges.push(u - gap);
    edges
}

fn probe_max<T: Scalar>(h: &HField<T>, model: &IntensityModel<T>, a: T, b: T, z: u64) -> Result<T> {
    let mut top = T::zero();
    for k in 0..=PROBES {
        let r = a + (b - a) * T::from_usize(k) / T::from_usize(PROBES);
        top = top.max(h.bridge_intensity(model, r, z)?);
    }
    Ok(top)
}

/// Piecewise-constant majorants of the bridge intensity, one per cell and
/// state. States whose `h` underflows in a cell get `∞` and are probed on
/// demand if a path ever reaches them.
struct Majorants<T> {
    edges: Vec<T>,
    /// `top[cell][z − x]`, before the safety factor
    top: Vec<Vec<T>>,
}

impl<T: Scalar> Majorants<T> {
    fn build(h: &HField<T>, model: &IntensityModel<T>) -> Self {
        let spec = *h.spec();
        let edges = cell_edges(spec.s, spec.u);
        let top = (0..edges.len() - 1)
            .into_par_iter()
            .map(|c| {
                (spec.x..spec.y)
                    .map(|z| probe_max(h, model, edges[c], edges[c + 1], z).unwrap_or(T::infinity()))
                    .collect()
            })
            .collect();
        Self { edges, top }
    }
}

fn one_path<T: Scalar, R: Rng>(
    model: &IntensityModel<T>,
    h: &HField<T>,
    maj: &Majorants<T>,
    rng: &mut R,
    stats: &mut ThinningStats,
) -> Result<PathSample<T>> {
    let spec = *h.spec();
    let mut t = spec.s;
    let mut z = spec.x;
    let mut jumps = Vec::with_capacity(spec.height() as usize);
    let mut factor = T::lit(SAFETY);
    let mut breaches = 0usize;
    let mut cell = 0;
    while z < spec.y && cell + 1 < maj.edges.len() {
        let end = maj.edges[cell + 1];
        let mut top = maj.top[cell][(z - spec.x) as usize];
        if !top.is_finite() || factor > T::lit(SAFETY) {
            top = probe_max(h, model, t, end, z)?;
        }
        let bound = top * factor;
        stats.windows += 1;
        if !(bound > T::zero()) {
            t = end;
            cell += 1;
            continue;
        }
        loop {
            let e: f64 = -(1.0 - rng.random::<f64>()).ln();
            let cand = t + T::lit(e) / bound;
            if cand >= end {
                t = end;
                cell += 1;
                factor = T::lit(SAFETY);
                break;
            }
            stats.candidates += 1;
            let rate = h.bridge_intensity(model, cand, z)?;
            if rate > bound {
                // stale majorant: resume from t with a larger one
                stats.breaches += 1;
                breaches += 1;
                if breaches > MAX_REFRESHES {
                    return Err(Error::MajorantBreach { t: cand.as_f64(), refreshes: breaches });
                }
                factor = factor.max(T::lit(2.0) * rate / top);
                break;
            }
            t = cand;
            if T::lit(rng.random::<f64>()) * bound < rate {
                stats.accepted += 1;
                jumps.push(cand);
                z += 1;
                break;
            }
        }
    }
    if jumps.len() as u64 != spec.height() {
        return Err(Error::PinMiss { got: jumps.len(), expected: spec.height() });
    }
    Ok(PathSample { x0: spec.x, jump_times: jumps })
}

/// `count` bridge paths simulated by thinning the bridge intensity of `h`.
/// Replica `r` uses stream `r` of `seed`.
pub fn sample_bridge<T: Scalar>(
    model: &IntensityModel<T>,
    h: &HField<T>,
    count: usize,
    seed: u64,
) -> Result<ThinningRun<T>> {
    let maj = Majorants::build(h, model);
    let results: Vec<(PathSample<T>, ThinningStats)> = (0..count)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r as u64);
            let mut stats = ThinningStats::default();
            one_path(model, h, &maj, &mut rng, &mut stats).map(|p| (p, stats))
        })
        .collect::<Result<_>>()?;
    let stats = results.iter().fold(ThinningStats::default(), |a, (_, s)| a.merge(*s));
    Ok(ThinningRun { paths: results.into_iter().map(|(p, _)| p).collect(), stats })
}
