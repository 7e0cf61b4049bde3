//! Monte Carlo check of the duality formula
//! `E[𝒟_u Φ] = E[Φ ∫ (u̇ + Ξ u) dX]` on bridge paths.

use serde::Serialize;
use serde_json::json;

use super::report::{CheckReport, Verdict};
use crate::engine::BridgeSpec;
use crate::error::{Error, Result};
use crate::intensity::IntensityModel;
use crate::sampler::PathSample;

/// |z| threshold for a passing duality check.
pub const DUALITY_Z: f64 = 4.0;

/// Smooth `u` on `[0, 1]` with `u(0) = u(1) = 0`.
#[derive(Clone, Copy)]
pub struct TestFunction {
    pub name: &'static str,
    pub u: fn(f64) -> f64,
    pub du: fn(f64) -> f64,
}

/// `Φ = φ(X₀; T₁, …, T_m)`, with the gradient of φ in the jump times.
#[derive(Clone, Copy)]
pub struct Functional {
    pub name: &'static str,
    pub m: usize,
    pub phi: fn(u64, &[f64]) -> f64,
    pub grad: fn(u64, &[f64], &mut [f64]),
}

/// The fixed catalog of `(Φ, u)` pairs.
pub fn duality_catalog() -> Vec<(Functional, TestFunction)> {
    use std::f64::consts::PI;
    let bump = TestFunction { name: "t(1-t)", u: |t| t * (1.0 - t), du: |t| 1.0 - 2.0 * t };
    let sine = TestFunction { name: "sin(pi t)", u: |t| (PI * t).sin(), du: |t| PI * (PI * t).cos() };
    let skew = TestFunction { name: "t^2(1-t)", u: |t| t * t * (1.0 - t), du: |t| 2.0 * t - 3.0 * t * t };
    let wave =
        TestFunction { name: "sin(2 pi t)", u: |t| (2.0 * PI * t).sin(), du: |t| 2.0 * PI * (2.0 * PI * t).cos() };
    vec![
        (Functional { name: "1", m: 0, phi: |_, _| 1.0, grad: |_, _, _| {} }, bump),
        (
            Functional {
                name: "sin(pi T1)",
                m: 1,
                phi: |_, t| (PI * t[0]).sin(),
                grad: |_, t, g| g[0] = PI * (PI * t[0]).cos(),
            },
            bump,
        ),
        (
            Functional {
                name: "T1 T2",
                m: 2,
                phi: |_, t| t[0] * t[1],
                grad: |_, t, g| {
                    g[0] = t[1];
                    g[1] = t[0];
                },
            },
            sine,
        ),
        (
            Functional {
                name: "cos(T1 + T3)",
                m: 3,
                phi: |_, t| (t[0] + t[2]).cos(),
                grad: |_, t, g| {
                    let d = -(t[0] + t[2]).sin();
                    g[0] = d;
                    g[2] = d;
                },
            },
            skew,
        ),
        (
            Functional {
                name: "X0 + T5^2",
                m: 5,
                phi: |x, t| x as f64 + t[4] * t[4],
                grad: |_, t, g| g[4] = 2.0 * t[4],
            },
            wave,
        ),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct DualityReport {
    pub functional: String,
    pub test_function: String,
    pub count: usize,
    pub lhs: f64,
    pub lhs_stderr: f64,
    pub rhs: f64,
    pub rhs_stderr: f64,
    pub z_score: f64,
    pub verdict: Verdict,
}

impl DualityReport {
    pub fn to_check(&self) -> CheckReport {
        CheckReport {
            check: "duality".into(),
            inputs: json!({ "functional": self.functional, "test_function": self.test_function,
                            "count": self.count }),
            tolerances: json!({ "abs_z": DUALITY_Z }),
            worst_margin: None,
            z_scores: Some(vec![self.z_score]),
            verdict: self.verdict,
            detail: json!({ "lhs": self.lhs, "lhs_stderr": self.lhs_stderr,
                            "rhs": self.rhs, "rhs_stderr": self.rhs_stderr }),
        }
    }
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    if v.is_empty() {
        return (0.0, 0.0);
    }
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Evaluates both sides of the duality formula on given paths. The z-score
/// uses the per-path differences, since both sides come from the same paths.
pub fn duality_on_paths(
    model: &IntensityModel<f64>,
    spec: &BridgeSpec<f64>,
    paths: &[PathSample<f64>],
    phi: &Functional,
    u: &TestFunction,
) -> Result<DualityReport> {
    if spec.s != 0.0 || spec.u != 1.0 {
        return Err(Error::BadWindow("the duality check runs on [0, 1]".into()));
    }
    let n = spec.height() as usize;
    if phi.m > n && n > 0 {
        return Err(Error::InvalidInput(format!("{} needs {} jumps, bridge has {n}", phi.name, phi.m)));
    }
    let mut lhs = Vec::with_capacity(paths.len());
    let mut rhs = Vec::with_capacity(paths.len());
    let mut grad = vec![0.0; phi.m];
    for p in paths {
        if p.jump_times.is_empty() {
            lhs.push(0.0);
            rhs.push(0.0);
            continue;
        }
        let times = &p.jump_times;
        grad.iter_mut().for_each(|g| *g = 0.0);
        (phi.grad)(p.x0, times, &mut grad);
        lhs.push(-grad.iter().zip(times).map(|(g, &t)| g * (u.u)(t)).sum::<f64>());
        let mut integral = 0.0;
        for (j, &t) in times.iter().enumerate() {
            integral += (u.du)(t) + model.characteristic(t, p.state_before(j + 1))? * (u.u)(t);
        }
        rhs.push((phi.phi)(p.x0, times) * integral);
    }
    let diff: Vec<f64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    let (l, lse) = mean_se(&lhs);
    let (r, rse) = mean_se(&rhs);
    let (d, dse) = mean_se(&diff);
    let z = if dse > 0.0 {
        d / dse
    } else if d.abs() <= 1e-12 * (1.0 + l.abs() + r.abs()) {
        // zero-variance sides that agree up to roundoff
        0.0
    } else if paths.len() > 1 {
        return Err(Error::DegenerateVariance { lhs: l, rhs: r });
    } else {
        f64::INFINITY
    };
    Ok(DualityReport {
        functional: phi.name.into(),
        test_function: u.name.into(),
        count: paths.len(),
        lhs: l,
        lhs_stderr: lse,
        rhs: r,
        rhs_stderr: rse,
        z_score: z,
        verdict: Verdict::from_bool(z.abs() <= DUALITY_Z),
    })
}

/// Samples `count` bridge paths by thinning and runs [`duality_on_paths`].
pub fn duality_check(
    model: &IntensityModel<f64>,
    spec: &BridgeSpec<f64>,
    u: &TestFunction,
    phi: &Functional,
    count: usize,
    seed: u64,
) -> Result<DualityReport> {
    let h = crate::engine::solve_h(model, spec, super::dominance::DEFAULT_CHECK_STEP)?;
    let run = crate::sampler::sample_bridge(model, &h, count, seed)?;
    duality_on_paths(model, spec, &run.paths, phi, u)
}
