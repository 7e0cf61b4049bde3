use counting_bridges::analytic::constant_char_marginal;
use counting_bridges::engine::{marginal_table, BridgeSpec};
use counting_bridges::intensity::{IntensityModel, ModelDescriptor};
use counting_bridges::verify::{
    default_t_grid, dominance_check, lln_experiment_capped, Certification, Direction, Verdict,
};
use counting_bridges::{Error, Intensity};

#[test]
fn laziness_orders_the_constant_families() {
    let spec = BridgeSpec::unit(0, 8).unwrap();
    let lams = [-4.0, -1.0, 0.0, 2.0, 6.0];
    for t in [0.2, 0.5, 0.8] {
        for i in 1..=8 {
            let tails: Vec<f64> = lams
                .iter()
                .map(|&l| constant_char_marginal(&spec, l, t).unwrap().tail(i).unwrap())
                .collect();
            assert!(tails.windows(2).all(|w| w[1] <= w[0]), "t={t} i={i}");
        }
    }
}

#[test]
fn direction_flips_the_margin_sign() {
    let m = Intensity::time_exponential(1.5, -2.0).unwrap();
    let spec = BridgeSpec::unit(0, 6).unwrap();
    let grid = default_t_grid(&spec);
    let sharp = dominance_check(&m, &spec, -2.0, Direction::UpperBoundChar, &grid, 1e-6).unwrap();
    assert!(sharp.verdict.passed() && sharp.max_abs_margin() < 1e-6);
    // Ξ ≡ −2 ≥ −3: a valid lower bound, not an upper one
    let lower = dominance_check(&m, &spec, -3.0, Direction::LowerBoundChar, &grid, 1e-6).unwrap();
    let upper = dominance_check(&m, &spec, -3.0, Direction::UpperBoundChar, &grid, 1e-6).unwrap();
    assert!(lower.verdict.passed() && lower.worst_margin > 0.0);
    assert_eq!(upper.verdict, Verdict::Fail);
    assert_eq!(upper.certification, Certification::NotABound);
    for (a, b) in lower.rows.iter().zip(&upper.rows) {
        assert_eq!(a.margin, -b.margin);
    }
}

fn tabulated_product() -> IntensityModel<f64> {
    let t_grid: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
    let rates: Vec<Vec<f64>> = t_grid
        .iter()
        .map(|&t| (0..=6).map(|z| (3.0 * t).exp() * (1.0 + 0.1 * z as f64)).collect())
        .collect();
    let text = serde_json::json!({
        "family": "tabulated",
        "params": { "t_grid": t_grid, "z_min": 0, "rates": rates }
    })
    .to_string();
    ModelDescriptor::from_json(&text).unwrap().build().unwrap()
}

#[test]
fn tabulated_model_tracks_its_source_and_is_grid_certified() {
    let tab = tabulated_product();
    let spec = BridgeSpec::unit(0, 5).unwrap();
    let exact = marginal_table(&Intensity::product(1.0, 3.0, 0.1).unwrap(), &spec, 1e-3).unwrap();
    let approx = marginal_table(&tab, &spec, 1e-3).unwrap();
    for (a, b) in exact.rows().iter().zip(approx.rows()) {
        for (p, q) in a.iter().zip(b) {
            assert!((p - q).abs() < 1e-4);
        }
    }
    let r = dominance_check(&tab, &spec, 3.0, Direction::LowerBoundChar, &default_t_grid(&spec), 1e-6).unwrap();
    assert_eq!(r.certification, Certification::GridCertifiedOnly);
    assert!(r.verdict.passed());
}

#[test]
fn lln_respects_its_budget() {
    let m = Intensity::poisson(1.0).unwrap();
    let err = lln_experiment_capped(&m, 0.0, &[1000], 1000, 1, 999_999).unwrap_err();
    assert!(matches!(err, Error::ResourceCap { requested: 1_000_000, cap: 999_999 }));
}
