use serde::Serialize;
use serde_json::json;

use super::report::{CheckReport, Verdict};
use crate::engine::{marginal_table, mean_curve, second_differences, BridgeSpec};
use crate::error::Result;
use crate::intensity::{IntensityModel, DEFAULT_BOUNDS_STEP};

/// Table step used by [`convexity_check`] callers that have no preference.
/// Second differences divide the mean error by the squared sampling step,
/// so this is finer than the engine's usual 1e-3.
pub const DEFAULT_CONVEXITY_STEP: f64 = 5e-4;
/// Sampling step of the mean curve, as a fraction of the window.
pub const CURVE_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    Convex,
    Concave,
    /// Ξ ≡ 0 on the ladder: the curve is both convex and concave.
    Affine,
    NoClaim,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvexityReport {
    pub spec: BridgeSpec<f64>,
    pub char_inf: f64,
    pub char_sup: f64,
    pub claim: Claim,
    pub tolerance: f64,
    pub min_second_diff: f64,
    pub max_second_diff: f64,
    pub profile: Vec<(f64, f64)>,
    pub verdict: Verdict,
}

impl ConvexityReport {
    pub fn to_check(&self) -> CheckReport {
        let worst = match self.claim {
            Claim::Convex => self.min_second_diff,
            Claim::Concave => -self.max_second_diff,
            Claim::Affine => -self.min_second_diff.abs().max(self.max_second_diff.abs()),
            Claim::NoClaim => 0.0,
        };
        CheckReport {
            check: "convexity".into(),
            inputs: json!({ "spec": self.spec, "char_inf": self.char_inf, "char_sup": self.char_sup }),
            tolerances: json!({ "second_diff": self.tolerance }),
            worst_margin: Some(worst),
            z_scores: None,
            verdict: self.verdict,
            detail: json!({ "claim": self.claim, "min_second_diff": self.min_second_diff,
                            "max_second_diff": self.max_second_diff }),
        }
    }
}

/// Sign of the second differences of `t ↦ E(X_t)` against the sign of Ξ on
/// the window. When Ξ changes sign nothing is claimed and the check passes.
pub fn convexity_check(
    model: &IntensityModel<f64>,
    spec: &BridgeSpec<f64>,
    h_step: f64,
    tol: f64,
) -> Result<ConvexityReport> {
    spec.validate()?;
    let (inf, sup) = if spec.height() == 0 {
        (0.0, 0.0)
    } else {
        let b = model.characteristic_bounds(
            spec.s,
            spec.u,
            spec.x as i64,
            spec.y as i64 - 1,
            DEFAULT_BOUNDS_STEP,
        )?;
        (b.inf, b.sup)
    };
    let table = marginal_table(model, spec, h_step)?;
    let cells = (1.0 / CURVE_FRACTION).round() as usize;
    let times: Vec<f64> = (0..=cells).map(|k| spec.s + spec.length() * k as f64 / cells as f64).collect();
    let curve = mean_curve(&table.subsample(&times));
    let profile = second_differences(&curve)?;
    let lo = profile.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let hi = profile.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let claim = match (inf >= 0.0, sup <= 0.0) {
        (true, true) => Claim::Affine,
        (true, false) => Claim::Convex,
        (false, true) => Claim::Concave,
        (false, false) => Claim::NoClaim,
    };
    let ok = match claim {
        Claim::Convex => lo >= -tol,
        Claim::Concave => hi <= tol,
        Claim::Affine => lo >= -tol && hi <= tol,
        Claim::NoClaim => true,
    };
    Ok(ConvexityReport {
        spec: *spec,
        char_inf: inf,
        char_sup: sup,
        claim,
        tolerance: tol,
        min_second_diff: lo,
        max_second_diff: hi,
        profile,
        verdict: Verdict::from_bool(ok),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(m: IntensityModel<f64>) -> ConvexityReport {
        convexity_check(&m, &BridgeSpec::unit(0, 20).unwrap(), DEFAULT_CONVEXITY_STEP, 1e-8).unwrap()
    }

    #[test]
    fn curvature_follows_the_sign_of_xi() {
        let r = run(IntensityModel::poisson(1.0).unwrap());
        assert_eq!(r.claim, Claim::Affine);
        assert!(r.verdict.passed(), "{} {}", r.min_second_diff, r.max_second_diff);
        let r = run(IntensityModel::time_exponential(1.0, 3.0).unwrap());
        assert_eq!((r.claim, r.verdict), (Claim::Convex, Verdict::Pass));
        let r = run(IntensityModel::time_exponential(1.0, -5.0).unwrap());
        assert_eq!((r.claim, r.verdict), (Claim::Concave, Verdict::Pass));
        assert_eq!(r.profile.len(), 99);
    }

    #[test]
    fn mixed_sign_makes_no_claim() {
        // Ξ = −2 + 3 e^{−2t} goes from 1 down to about −1.6
        let m = IntensityModel::product(3.0, -2.0, 1.0).unwrap();
        let r = run(m);
        assert!(r.char_inf < 0.0 && r.char_sup > 0.0);
        assert_eq!((r.claim, r.verdict), (Claim::NoClaim, Verdict::Pass));
    }
}
