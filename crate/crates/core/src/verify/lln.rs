//! Concentration of rescaled bridges `X_t / N` around `π_λ(t)`.

use serde::Serialize;
use serde_json::json;

use super::report::{CheckReport, Verdict};
use crate::analytic::pi_lambda;
use crate::engine::{solve_h, BridgeSpec, MAX_H_STEP};
use crate::error::{Error, Result};
use crate::intensity::IntensityModel;
use crate::sampler::{sample_bridge, PathSample};

/// Default cap on `Σ N · replicas` for one experiment.
pub const LLN_BUDGET: u64 = 2_000_000;

#[derive(Debug, Clone, Serialize)]
pub struct LlnRow {
    pub n: u64,
    pub h_step: f64,
    pub distances: Vec<f64>,
    pub median: f64,
    pub p90: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LLNReport {
    pub lambda: f64,
    pub replicas: usize,
    pub seed: u64,
    pub rows: Vec<LlnRow>,
    pub medians_non_increasing: bool,
}

impl LLNReport {
    pub fn to_check(&self) -> CheckReport {
        CheckReport {
            check: "lln".into(),
            inputs: json!({ "lambda": self.lambda, "n": self.rows.iter().map(|r| r.n).collect::<Vec<_>>(),
                            "replicas": self.replicas, "seed": self.seed }),
            tolerances: json!({}),
            worst_margin: None,
            z_scores: None,
            verdict: Verdict::from_bool(self.medians_non_increasing),
            detail: json!({ "median": self.rows.iter().map(|r| r.median).collect::<Vec<_>>(),
                            "p90": self.rows.iter().map(|r| r.p90).collect::<Vec<_>>() }),
        }
    }
}

/// `sup_t |X_t / N − π_λ(t)|` for a path from 0 to `N` on `[0, 1]`. Between
/// jumps `X/N` is flat and `π_λ` monotone, so the sup is attained at the
/// ends of the flat stretches.
pub fn sup_distance(path: &PathSample<f64>, lambda: f64) -> f64 {
    let n = path.jump_times.len();
    let nf = n.max(1) as f64;
    let mut edges = Vec::with_capacity(n + 2);
    edges.push(0.0);
    edges.extend_from_slice(&path.jump_times);
    edges.push(1.0);
    let mut sup = 0.0f64;
    for k in 0..=n {
        let level = (path.x0 as f64 + k as f64) / nf;
        sup = sup
            .max((level - pi_lambda(lambda, edges[k])).abs())
            .max((level - pi_lambda(lambda, edges[k + 1])).abs());
    }
    sup
}

/// Table step used for height `n`: RK4 in the h-equation needs `n · step`
/// small.
pub fn lln_h_step(n: u64) -> f64 {
    (0.1 / n.max(1) as f64).min(1e-3).min(MAX_H_STEP)
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn lln_experiment(
    model: &IntensityModel<f64>,
    lambda: f64,
    n_list: &[u64],
    replicas: usize,
    seed: u64,
) -> Result<LLNReport> {
    lln_experiment_capped(model, lambda, n_list, replicas, seed, LLN_BUDGET)
}

/// Samples `replicas` bridges `0 → N` for each `N` and summarizes their
/// sup-distance to `π_λ`. Replica streams for different `N` are keyed by
/// `seed + N`.
pub fn lln_experiment_capped(
    model: &IntensityModel<f64>,
    lambda: f64,
    n_list: &[u64],
    replicas: usize,
    seed: u64,
    cap: u64,
) -> Result<LLNReport> {
    let requested: u64 = n_list.iter().map(|&n| n.saturating_mul(replicas as u64)).sum();
    if requested > cap {
        return Err(Error::ResourceCap { requested, cap });
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let spec = BridgeSpec::unit(0, n)?;
        let step = lln_h_step(n);
        let h = solve_h(model, &spec, step)?;
        let run = sample_bridge(model, &h, replicas, seed.wrapping_add(n))?;
        let mut d: Vec<f64> = run.paths.iter().map(|p| sup_distance(p, lambda)).collect();
        let mut sorted = d.clone();
        sorted.sort_by(f64::total_cmp);
        let (median, p90) = (quantile(&sorted, 0.5), quantile(&sorted, 0.9));
        d.shrink_to_fit();
        rows.push(LlnRow { n, h_step: step, distances: d, median, p90 });
    }
    let non_increasing = rows.windows(2).all(|w| w[1].median <= w[0].median);
    Ok(LLNReport { lambda, replicas, seed, rows, medians_non_increasing: non_increasing })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sup_distance_examples() {
        let p = PathSample { x0: 0, jump_times: vec![0.5] };
        assert!((sup_distance(&p, 0.0) - 0.5).abs() < 1e-15);
        let p = PathSample { x0: 0, jump_times: vec![0.25, 0.5, 0.75] };
        // level 0 on [0, 0.25] and level 1 on [0.75, 1] both reach 0.25
        assert!((sup_distance(&p, 0.0) - 0.25).abs() < 1e-15);
        assert!(sup_distance(&p, 3.0) > 0.25);
    }

    #[test]
    fn budget() {
        let m = IntensityModel::poisson(1.0).unwrap();
        assert!(matches!(
            lln_experiment_capped(&m, 0.0, &[100, 200], 10, 1, 2_999),
            Err(Error::ResourceCap { requested: 3000, cap: 2_999 })
        ));
    }

    #[test]
    fn poisson_medians_shrink() {
        let m = IntensityModel::poisson(1.0).unwrap();
        let r = lln_experiment(&m, 0.0, &[20, 80], 200, 3).unwrap();
        assert!(r.medians_non_increasing);
        for row in &r.rows {
            let target = 0.83 / (row.n as f64).sqrt();
            assert!((row.median / target - 1.0).abs() < 0.25, "N={} {}", row.n, row.median);
        }
    }
}
