mod common;

use common::{column, ks_critical_1pct, ks_two_sample};
use counting_bridges::engine::{marginal_table, solve_h, BridgeSpec};
use counting_bridges::sampler::{
    sample_bridge, sample_constant, sample_rejection, simplex_oracle_marginal, xi_tables, PathSample,
};
use counting_bridges::Intensity;

fn freq(paths: &[PathSample<f64>], t: f64, k: u64) -> f64 {
    paths.iter().filter(|p| p.value_at(t) >= k).count() as f64 / paths.len() as f64
}

#[test]
fn poisson_bridge_has_uniform_order_statistics() {
    let m = Intensity::poisson(2.0).unwrap();
    let spec = BridgeSpec::unit(0, 5).unwrap();
    let h = solve_h(&m, &spec, 1e-3).unwrap();
    let thin = sample_bridge(&m, &h, 10_000, 101).unwrap();
    assert_eq!(thin.stats.breaches, 0);
    let flat = sample_constant(0.0, &spec, 10_000, 102).unwrap();
    let crit = ks_critical_1pct(10_000, 10_000);
    for j in 1..=5 {
        let d = ks_two_sample(&column(&thin.paths, j), &column(&flat, j));
        assert!(d < crit, "jump {j}: KS {d} ≥ {crit}");
    }
}

#[test]
fn oracle_triangle_with_empirical_frequencies() {
    let m = Intensity::product(1.0, 3.0, 0.1).unwrap();
    let spec = BridgeSpec::unit(0, 3).unwrap();
    let pot = xi_tables(&m, &spec, 1e-4).unwrap();
    let table = marginal_table(&m, &spec, 1e-3).unwrap();
    let h = solve_h(&m, &spec, 1e-3).unwrap();
    let count = 100_000;
    let paths = sample_bridge(&m, &h, count, 7).unwrap().paths;
    for t in [0.3, 0.5, 0.7] {
        let r = table.nearest_row(t);
        for i in 1..=3u64 {
            let q = simplex_oracle_marginal(&pot, t, i).unwrap();
            let e = table.tail(r, i);
            assert!((q - e).abs() < 1e-5, "oracle {q} engine {e}");
            let f = freq(&paths, t, i);
            let se = (e * (1.0 - e) / count as f64).sqrt();
            assert!((f - e).abs() < 3.0 * se, "t={t} i={i}: {f} vs {e}");
        }
    }
}

#[test]
fn h_transform_histogram_matches_table() {
    let m = Intensity::product(1.0, 3.0, 0.1).unwrap();
    let spec = BridgeSpec::new(2, 7, 0.1, 0.9).unwrap();
    let table = marginal_table(&m, &spec, 1e-3).unwrap();
    let r = table.nearest_row(0.5);
    let t = table.times()[r];
    let h = solve_h(&m, &spec, 1e-3).unwrap();
    let count = 100_000;
    let run = sample_bridge(&m, &h, count, 55).unwrap();
    assert_eq!(run.stats.breaches, 0);
    assert!(run.paths.iter().all(|p| p.n() == 5 && p.inside(0.1, 0.9)));
    for (k, &p) in table.row(r).iter().enumerate() {
        let z = spec.x + k as u64;
        let f = run.paths.iter().filter(|q| q.value_at(t) == z).count() as f64 / count as f64;
        let se = (p * (1.0 - p) / count as f64).sqrt().max(1e-5);
        assert!((f - p).abs() < 3.0 * se, "z={z}: {f} vs {p}");
    }
}

#[test]
fn rejection_and_thinning_agree() {
    let m = Intensity::product(1.0, 3.0, 0.1).unwrap();
    let spec = BridgeSpec::unit(0, 4).unwrap();
    let pot = xi_tables(&m, &spec, 1e-4).unwrap();
    let rej = sample_rejection(&m, &pot, 10_000, 1).unwrap();
    let h = solve_h(&m, &spec, 1e-3).unwrap();
    let thin = sample_bridge(&m, &h, 10_000, 2).unwrap();
    let crit = ks_critical_1pct(10_000, 10_000);
    for j in 1..=4 {
        let d = ks_two_sample(&column(&rej.paths, j), &column(&thin.paths, j));
        assert!(d < crit, "jump {j}: KS {d}");
    }
}

#[test]
fn seeds_are_reproducible_across_thread_pools() {
    let m = Intensity::time_exponential(1.0, -2.0).unwrap();
    let spec = BridgeSpec::unit(1, 9).unwrap();
    let h = solve_h(&m, &spec, 1e-3).unwrap();
    let a = sample_bridge(&m, &h, 500, 3).unwrap().paths;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let b = pool.install(|| sample_bridge(&m, &h, 500, 3).unwrap().paths);
    assert_eq!(a, b);
}
