use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::config::{CheckName, CommandConfig, DirectionArg, ModelEntry, RunConfig, SamplerKind};
use crate::analytic::mean_bound;
use crate::engine::{marginal_table, mean_curve, second_differences, solve_h, BridgeSpec};
use crate::error::{Error, Result};
use crate::intensity::{IntensityModel, DEFAULT_BOUNDS_STEP};
use crate::io::{fmt17, write_atomic};
use crate::sampler::{
    median_jump_time, paths_csv, sample_bridge, sample_constant, sample_rejection, xi_tables, PathSample,
    SampleSummary, DEFAULT_XI_STEP,
};
use crate::verify::{
    convexity_check, default_t_grid, dominance_check, duality_catalog, duality_on_paths, lln_experiment,
    mean_bound_check, CheckReport, Direction, Verdict,
};

/// What a run produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub passed: bool,
    pub files: Vec<PathBuf>,
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        write_atomic(&path, bytes)?;
        self.files.push(path);
        Ok(())
    }

    fn json<S: serde::Serialize>(&mut self, name: &str, v: &S) -> Result<()> {
        let text = serde_json::to_string_pretty(v)? + "\n";
        self.put(name, text.as_bytes())
    }
}

fn file_name(base: &str, ext: &str, entry: &ModelEntry, many: bool) -> String {
    if many {
        format!("{base}_{}.{ext}", entry.label)
    } else {
        format!("{base}.{ext}")
    }
}

fn uniform_times(spec: &BridgeSpec<f64>, t_step: f64) -> Vec<f64> {
    let cells = (spec.length() / t_step).round().max(1.0) as usize;
    (0..=cells).map(|k| spec.s + spec.length() * k as f64 / cells as f64).collect()
}

/// Runs a resolved configuration, writing every output and the manifest
/// under `out`.
pub fn execute(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    cfg.validate()?;
    let spec = cfg.spec()?;
    let mut w = Writer { dir: out, files: Vec::new() };
    w.put("manifest.json", cfg.to_json().as_bytes())?;
    let many = cfg.models.len() > 1;
    let mut passed = true;
    match &cfg.command {
        CommandConfig::Characteristics { t_step } => {
            for e in &cfg.models {
                let model = e.build()?;
                let mut csv = String::from("t,z,xi\n");
                for t in uniform_times(&spec, *t_step) {
                    for z in spec.x..spec.y {
                        let xi = model.characteristic(t, z)?;
                        let _ = writeln!(csv, "{},{z},{}", fmt17(t), fmt17(xi));
                    }
                }
                w.put(&file_name("characteristics", "csv", e, many), csv.as_bytes())?;
            }
        }
        CommandConfig::MeanCurve { t_step } => {
            for e in &cfg.models {
                let model = e.build()?;
                let table = marginal_table(&model, &spec, cfg.h_step)?;
                let curve = mean_curve(&table.subsample(&uniform_times(&spec, *t_step)));
                w.put(&file_name("mean_curve", "csv", e, many), mean_csv(&spec, &curve, e.lambda)?.as_bytes())?;
            }
        }
        CommandConfig::Marginals { t_step } => {
            for e in &cfg.models {
                let model = e.build()?;
                let table = marginal_table(&model, &spec, cfg.h_step)?.subsample(&uniform_times(&spec, *t_step));
                let mut buf = Vec::new();
                table.write_csv(&mut buf)?;
                w.put(&file_name("marginals", "csv", e, many), &buf)?;
            }
        }
        CommandConfig::Sample { sampler } => {
            for e in &cfg.models {
                let model = e.build()?;
                let (paths, summary) = run_sampler(cfg, &model, e, &spec, *sampler)?;
                w.put(&file_name("paths", "csv", e, many), paths_csv(&paths).as_bytes())?;
                w.json(&file_name("summary", "json", e, many), &summary)?;
            }
        }
        CommandConfig::Verify { checks, direction, convexity_step } => {
            let mut reports = Vec::new();
            let mut skipped = Vec::new();
            for e in &cfg.models {
                let model = e.build()?;
                let (r, s) = run_checks(cfg, &model, e, &spec, checks, *direction, *convexity_step, &mut w, many)?;
                reports.extend(r);
                skipped.extend(s);
            }
            passed = reports.iter().all(|(_, r)| r.verdict.passed());
            let body: Vec<Value> =
                reports.iter().map(|(label, r)| json!({ "model": label, "report": r })).collect();
            w.json("verify.json", &json!({ "all_pass": passed, "reports": body, "skipped": skipped }))?;
        }
        CommandConfig::Lln { n_list } => {
            let mut all = Vec::new();
            for e in &cfg.models {
                let model = e.build()?;
                let lambda = e.lambda.or(model.constant_characteristic()).ok_or_else(|| {
                    Error::InvalidInput("lln needs --lambda for a model without constant characteristic".into())
                })?;
                let report = lln_experiment(&model, lambda, n_list, cfg.replicas, cfg.seed)?;
                passed &= report.medians_non_increasing;
                let mut csv = String::from("n,replica,sup_distance\n");
                for row in &report.rows {
                    for (r, d) in row.distances.iter().enumerate() {
                        let _ = writeln!(csv, "{},{r},{}", row.n, fmt17(*d));
                    }
                }
                w.put(&file_name("lln", "csv", e, many), csv.as_bytes())?;
                all.push(json!({ "model": e.label, "report": report.to_check() }));
            }
            w.json("lln.json", &json!({ "all_pass": passed, "reports": all }))?;
        }
    }
    if cfg.gnuplot {
        w.put(&format!("{}.gp", cfg.command.name()), gnuplot_stub(cfg, many).as_bytes())?;
    }
    Ok(Outcome { passed, files: w.files })
}

fn mean_csv(spec: &BridgeSpec<f64>, curve: &[(f64, f64)], lambda: Option<f64>) -> Result<String> {
    let second = if curve.len() >= 3 { second_differences(curve)? } else { Vec::new() };
    let mut csv = String::from("t,mean,second_diff,bound\n");
    for (k, &(t, m)) in curve.iter().enumerate() {
        let d = if k == 0 || k + 1 == curve.len() { String::new() } else { fmt17(second[k - 1].1) };
        let b = match lambda {
            Some(l) => fmt17(mean_bound(spec, l, t)?),
            None => String::new(),
        };
        let _ = writeln!(csv, "{},{},{d},{b}", fmt17(t), fmt17(m));
    }
    Ok(csv)
}

/// Median over paths of the share of jumps after `cut`.
fn median_late_fraction(paths: &[PathSample<f64>], cut: f64) -> Option<f64> {
    let mut f: Vec<f64> = paths
        .iter()
        .filter(|p| !p.jump_times.is_empty())
        .map(|p| p.jump_times.iter().filter(|&&t| t > cut).count() as f64 / p.jump_times.len() as f64)
        .collect();
    if f.is_empty() {
        return None;
    }
    f.sort_by(f64::total_cmp);
    let m = f.len();
    Some(if m % 2 == 1 { f[m / 2] } else { 0.5 * (f[m / 2 - 1] + f[m / 2]) })
}

fn run_sampler(
    cfg: &RunConfig,
    model: &IntensityModel<f64>,
    entry: &ModelEntry,
    spec: &BridgeSpec<f64>,
    kind: SamplerKind,
) -> Result<(Vec<PathSample<f64>>, SampleSummary)> {
    let (paths, rate, stats) = match kind {
        SamplerKind::Thinning => {
            let h = solve_h(model, spec, cfg.h_step)?;
            let run = sample_bridge(model, &h, cfg.replicas, cfg.seed)?;
            (run.paths, run.stats.acceptance_rate(), serde_json::to_value(run.stats)?)
        }
        SamplerKind::Constant => {
            let lambda = model.constant_characteristic().or(entry.lambda).ok_or_else(|| {
                Error::InvalidInput("the constant sampler needs a constant characteristic".into())
            })?;
            let paths = sample_constant(lambda, spec, cfg.replicas, cfg.seed)?;
            (paths, 1.0, json!({ "lambda": lambda }))
        }
        SamplerKind::Rejection => {
            let pot = xi_tables(model, spec, DEFAULT_XI_STEP)?;
            let run = sample_rejection(model, &pot, cfg.replicas, cfg.seed)?;
            let rate = run.acceptance_rate();
            let stats = json!({ "lambda_hat": run.lambda_hat, "proposals": run.proposals });
            (run.paths, rate, stats)
        }
    };
    let mut stats = stats;
    stats["median_late_fraction_0_75"] = json!(median_late_fraction(&paths, 0.75));
    let summary = SampleSummary {
        sampler: format!("{kind:?}").to_lowercase(),
        seed: cfg.seed,
        count: paths.len(),
        n: spec.height(),
        acceptance_rate: rate,
        statistics: stats,
        median_jump_time: median_jump_time(&paths),
    };
    Ok((paths, summary))
}

/// Reports tagged with the label of the model they ran on.
type Labeled = Vec<(String, CheckReport)>;

#[allow(clippy::too_many_arguments)]
fn run_checks(
    cfg: &RunConfig,
    model: &IntensityModel<f64>,
    entry: &ModelEntry,
    spec: &BridgeSpec<f64>,
    checks: &[CheckName],
    direction: DirectionArg,
    convexity_step: f64,
    w: &mut Writer<'_>,
    many: bool,
) -> Result<(Labeled, Vec<Value>)> {
    let tol = &cfg.tolerances;
    let dir = match direction {
        DirectionArg::Lower => Direction::LowerBoundChar,
        DirectionArg::Upper => Direction::UpperBoundChar,
    };
    // λ defaults to the extreme of Ξ on the window and ladder
    let lambda = match entry.lambda {
        Some(l) => l,
        None if spec.height() == 0 => 0.0,
        None => {
            let b = model.characteristic_bounds(spec.s, spec.u, spec.x as i64, spec.y as i64 - 1, DEFAULT_BOUNDS_STEP)?;
            match dir {
                Direction::LowerBoundChar => b.inf,
                Direction::UpperBoundChar => b.sup,
            }
        }
    };
    let grid = default_t_grid(spec);
    let mut out = Vec::new();
    let mut skipped = Vec::new();
    let label = entry.label.clone();
    for check in checks {
        match check {
            CheckName::Convexity => {
                let r = convexity_check(model, spec, convexity_step, tol.second_diff)?;
                out.push((label.clone(), r.to_check()));
            }
            CheckName::Dominance => {
                let r = dominance_check(model, spec, lambda, dir, &grid, tol.margin)?;
                let mut csv = String::from("t,i,computed_tail,benchmark_tail,margin\n");
                for row in &r.rows {
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{}",
                        fmt17(row.t),
                        row.i,
                        fmt17(row.computed_tail),
                        fmt17(row.benchmark_tail),
                        fmt17(row.margin)
                    );
                }
                w.put(&file_name("dominance", "csv", entry, many), csv.as_bytes())?;
                out.push((label.clone(), r.to_check()));
            }
            CheckName::MeanBound => {
                if dir == Direction::UpperBoundChar {
                    skipped.push(json!({ "model": label, "check": "mean_bound",
                                         "reason": "the mean bound needs a lower characteristic bound" }));
                    continue;
                }
                let mut t = vec![spec.s, spec.u];
                t.extend(&grid);
                let r = mean_bound_check(model, spec, lambda, &t, tol.margin)?;
                out.push((label.clone(), r.to_check()));
            }
            CheckName::Duality => {
                if spec.s != 0.0 || spec.u != 1.0 {
                    skipped.push(json!({ "model": label, "check": "duality", "reason": "window is not [0, 1]" }));
                    continue;
                }
                let h = solve_h(model, spec, cfg.h_step)?;
                let paths = sample_bridge(model, &h, cfg.replicas, cfg.seed)?.paths;
                for (phi, u) in duality_catalog() {
                    if phi.m > spec.height() as usize && spec.height() > 0 {
                        skipped.push(json!({ "model": label, "check": "duality", "functional": phi.name,
                                             "reason": "bridge has fewer jumps than the functional reads" }));
                        continue;
                    }
                    let mut r = duality_on_paths(model, spec, &paths, &phi, &u)?.to_check();
                    let z = r.z_scores.as_ref().map_or(0.0, |z| z[0]);
                    r.verdict = Verdict::from_bool(z.abs() <= tol.z);
                    r.tolerances = json!({ "abs_z": tol.z });
                    out.push((label.clone(), r));
                }
            }
        }
    }
    Ok((out, skipped))
}

fn gnuplot_stub(cfg: &RunConfig, many: bool) -> String {
    let files: Vec<String> = cfg
        .models
        .iter()
        .map(|e| {
            let base = match cfg.command {
                CommandConfig::Characteristics { .. } => "characteristics",
                CommandConfig::MeanCurve { .. } => "mean_curve",
                CommandConfig::Marginals { .. } => "marginals",
                CommandConfig::Sample { .. } => "paths",
                CommandConfig::Verify { .. } => "dominance",
                CommandConfig::Lln { .. } => "lln",
            };
            file_name(base, "csv", e, many)
        })
        .collect();
    let (x, y) = match cfg.command {
        CommandConfig::Characteristics { .. } => ("1", "3"),
        CommandConfig::MeanCurve { .. } => ("1", "2"),
        CommandConfig::Marginals { .. } => ("1", "3"),
        CommandConfig::Sample { .. } => ("3", "2"),
        CommandConfig::Verify { .. } => ("1", "5"),
        CommandConfig::Lln { .. } => ("1", "3"),
    };
    let plots: Vec<String> =
        files.iter().map(|f| format!("'{f}' using {x}:{y} with points title '{f}'")).collect();
    format!("set datafile separator ','\nset key autotitle columnhead\nplot {}\n", plots.join(", \\\n     "))
}
