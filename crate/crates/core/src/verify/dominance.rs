use serde::{Deserialize, Serialize};
use serde_json::json;

use super::report::{CheckReport, Verdict};
use crate::analytic::{constant_char_marginal, mean_bound};
use crate::engine::{marginal_table, mean_curve, BridgeSpec, MarginalTable};
use crate::error::Result;
use crate::intensity::{IntensityModel, DEFAULT_BOUNDS_STEP};

/// Which side of the characteristic `λ` is claimed to bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `Ξ ≥ λ` on the ladder: tails are at most the benchmark's.
    LowerBoundChar,
    /// `Ξ ≤ λ` on the ladder: tails are at least the benchmark's.
    UpperBoundChar,
}

/// How far the hypothesis on `λ` is established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    /// Holds by the closed form of a parametric family.
    Exact,
    /// Holds on the scan grid of a tabulated model only.
    GridCertifiedOnly,
    /// `λ` is not a bound of Ξ in the claimed direction.
    NotABound,
}

#[derive(Debug, Clone, Serialize)]
pub struct MarginRow {
    pub t: f64,
    pub i: u64,
    pub computed_tail: f64,
    pub benchmark_tail: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub spec: BridgeSpec<f64>,
    pub lambda_used: f64,
    pub direction: Direction,
    pub certification: Certification,
    pub rows: Vec<MarginRow>,
    pub worst_margin: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl BoundReport {
    pub fn to_check(&self) -> CheckReport {
        CheckReport {
            check: "dominance".into(),
            inputs: json!({ "spec": self.spec, "lambda": self.lambda_used, "direction": self.direction,
                            "grid_points": self.rows.len() }),
            tolerances: json!({ "margin": self.tolerance }),
            worst_margin: Some(self.worst_margin),
            z_scores: None,
            verdict: self.verdict,
            detail: json!({ "certification": self.certification }),
        }
    }

    /// Largest `|margin|` over the grid.
    pub fn max_abs_margin(&self) -> f64 {
        self.rows.iter().map(|r| r.margin.abs()).fold(0.0, f64::max)
    }
}

/// Interior default grid `s + k (u − s) / 20`, `k = 1..19`.
pub fn default_t_grid(spec: &BridgeSpec<f64>) -> Vec<f64> {
    (1..20).map(|k| spec.s + spec.length() * k as f64 / 20.0).collect()
}

/// Default table step for the checks in this module.
pub const DEFAULT_CHECK_STEP: f64 = 1e-3;

pub(crate) fn certify(
    model: &IntensityModel<f64>,
    spec: &BridgeSpec<f64>,
    lambda: f64,
    direction: Direction,
) -> Result<Certification> {
    if spec.height() == 0 {
        return Ok(Certification::Exact);
    }
    let b = model.characteristic_bounds(spec.s, spec.u, spec.x as i64, spec.y as i64 - 1, DEFAULT_BOUNDS_STEP)?;
    let holds = match direction {
        Direction::LowerBoundChar => lambda <= b.inf,
        Direction::UpperBoundChar => lambda >= b.sup,
    };
    Ok(match (holds, b.exact) {
        (false, _) => Certification::NotABound,
        (true, true) => Certification::Exact,
        (true, false) => Certification::GridCertifiedOnly,
    })
}

/// Compares the bridge tails `P(X_t ≥ x + i)` with the binomial benchmark
/// `𝓑_{y−x, π^{s,u}_λ(t)}` over `t_grid × {1, …, y − x}`.
pub fn dominance_check(
    model: &IntensityModel<f64>,
    spec: &BridgeSpec<f64>,
    lambda: f64,
    direction: Direction,
    t_grid: &[f64],
    tol: f64,
) -> Result<BoundReport> {
    let table = marginal_table(model, spec, DEFAULT_CHECK_STEP)?;
    dominance_from_table(model, &table, lambda, direction, t_grid, tol)
}

/// [`dominance_check`] on a precomputed table.
pub fn dominance_from_table(
    model: &IntensityModel<f64>,
    table: &MarginalTable<f64>,
    lambda: f64,
    direction: Direction,
    t_grid: &[f64],
    tol: f64,
) -> Result<BoundReport> {
    let spec = *table.spec();
    let certification = certify(model, &spec, lambda, direction)?;
    let mut rows = Vec::new();
    for &t in t_grid {
        let r = table.nearest_row(t);
        let tr = table.times()[r];
        let bench = constant_char_marginal(&spec, lambda, tr)?;
        for i in 1..=spec.height() {
            let computed = table.tail(r, i);
            let benchmark = bench.tail(i)?;
            // benchmark − computed, taken on the complement when the tails
            // are close to 1
            let gap = if benchmark > 0.5 {
                table.lower_tail(r, i) - bench.lower_tail(i)?
            } else {
                benchmark - computed
            };
            let margin = match direction {
                Direction::LowerBoundChar => gap,
                Direction::UpperBoundChar => -gap,
            };
            rows.push(MarginRow { t: tr, i, computed_tail: computed, benchmark_tail: benchmark, margin });
        }
    }
    let worst = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let worst = if rows.is_empty() { 0.0 } else { worst };
    Ok(BoundReport {
        spec,
        lambda_used: lambda,
        direction,
        certification,
        rows,
        worst_margin: worst,
        tolerance: tol,
        verdict: Verdict::from_bool(worst >= -tol),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MeanBoundReport {
    pub spec: BridgeSpec<f64>,
    pub lambda_used: f64,
    pub certification: Certification,
    /// `(t, mean, bound)`
    pub rows: Vec<(f64, f64, f64)>,
    pub worst_slack: f64,
    pub max_abs_gap: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl MeanBoundReport {
    pub fn to_check(&self) -> CheckReport {
        CheckReport {
            check: "mean_bound".into(),
            inputs: json!({ "spec": self.spec, "lambda": self.lambda_used, "grid_points": self.rows.len() }),
            tolerances: json!({ "slack": self.tolerance }),
            worst_margin: Some(self.worst_slack),
            z_scores: None,
            verdict: self.verdict,
            detail: json!({ "certification": self.certification, "max_abs_gap": self.max_abs_gap }),
        }
    }
}

/// `E(X_t) ≤ x + (y − x) π^{s,u}_λ(t) + tol` on `t_grid`.
pub fn mean_bound_check(
    model: &IntensityModel<f64>,
    spec: &BridgeSpec<f64>,
    lambda: f64,
    t_grid: &[f64],
    tol: f64,
) -> Result<MeanBoundReport> {
    let certification = certify(model, spec, lambda, Direction::LowerBoundChar)?;
    let table = marginal_table(model, spec, DEFAULT_CHECK_STEP)?;
    let curve = mean_curve(&table);
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let r = table.nearest_row(t);
        let (tr, mean) = curve[r];
        rows.push((tr, mean, mean_bound(spec, lambda, tr)?));
    }
    let worst = rows.iter().map(|&(_, m, b)| b - m).fold(f64::INFINITY, f64::min);
    let worst = if rows.is_empty() { 0.0 } else { worst };
    let gap = rows.iter().map(|&(_, m, b)| (b - m).abs()).fold(0.0, f64::max);
    Ok(MeanBoundReport {
        spec: *spec,
        lambda_used: lambda,
        certification,
        rows,
        worst_slack: worst,
        max_abs_gap: gap,
        tolerance: tol,
        verdict: Verdict::from_bool(worst >= -tol),
    })
}
