use std::path::Path;
use std::process::Command;

fn cbridge(args: &[&str], dir: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_cbridge"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
        .status
        .code()
        .expect("exit code")
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn model(dir: &Path, name: &str, body: &str) -> String {
    std::fs::write(dir.join(name), body).unwrap();
    name.to_owned()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn characteristics_columns() {
    let d = tempfile::tempdir().unwrap();
    let p = model(d.path(), "p.json", r#"{"family":"poisson","params":{"alpha":2.0}}"#);
    let l = model(d.path(), "l.json", r#"{"family":"space_linear","params":{"lambda":3.0,"alpha":1.0}}"#);
    let q = model(d.path(), "q.json", r#"{"family":"product","params":{"alpha":1.0,"lambda":3.0,"beta":0.1}}"#);
    for (m, out) in [(&p, "p"), (&l, "l"), (&q, "q")] {
        assert_eq!(cbridge(&["characteristics", "--model", m, "--y", "4", "--out", out], d.path()), 0);
    }
    let rp = rows(&d.path().join("p/characteristics.csv"));
    assert_eq!(rp.len(), 101 * 4);
    assert!(rp.iter().all(|r| num(&r[2]) == 0.0));
    assert!(rows(&d.path().join("l/characteristics.csv")).iter().all(|r| (num(&r[2]) - 3.0).abs() < 1e-12));
    for r in rows(&d.path().join("q/characteristics.csv")) {
        let t = num(&r[0]);
        assert!((num(&r[2]) - (3.0 + 0.1 * (3.0 * t).exp())).abs() < 1e-12);
    }
}

#[test]
fn mean_curves() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(cbridge(&["mean-curve", "--lambda", "0,3", "--gnuplot"], d.path()), 0);
    let flat = rows(&d.path().join("out/mean_curve_lambda_0.csv"));
    assert!(flat.iter().all(|r| (num(&r[1]) - 20.0 * num(&r[0])).abs() < 1e-8));
    let tilted = rows(&d.path().join("out/mean_curve_lambda_3.csv"));
    let mid = tilted.iter().find(|r| num(&r[0]) == 0.5).unwrap();
    assert!((num(&mid[1]) - 3.648_510_476_127_127).abs() < 1e-6);
    assert!((num(&mid[3]) - 3.648_510_476_127_127).abs() < 1e-12);
    assert!(d.path().join("out/mean-curve.gp").exists());
}

#[test]
fn sampling_outputs() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(cbridge(&["sample", "--x", "4", "--y", "4", "--replicas", "10", "--out", "flat"], d.path()), 0);
    assert_eq!(std::fs::read_to_string(d.path().join("flat/paths.csv")).unwrap(), "replica,jump_index,time\n");
    assert_eq!(cbridge(&["sample", "--lambda", "0", "--out", "zero"], d.path()), 0);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("zero/summary.json")).unwrap()).unwrap();
    assert!((summary["median_jump_time"].as_f64().unwrap() - 0.5).abs() < 0.01);
    assert_eq!(summary["count"], 10_000);
    assert_eq!(summary["statistics"]["breaches"], 0);
    let rows = rows(&d.path().join("zero/paths.csv"));
    assert_eq!(rows.len(), 200_000);
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let q = model(d.path(), "q.json", r#"{"family":"product","params":{"alpha":1.0,"lambda":3.0,"beta":0.1}}"#);
    let base = ["verify", "--model", &q, "--y", "5", "--checks", "dominance,mean-bound"];
    assert_eq!(cbridge(&[&base[..], &["--lambda", "3"]].concat(), d.path()), 0);
    assert_eq!(cbridge(&[&base[..], &["--lambda", "4"]].concat(), d.path()), 1);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("out/verify.json")).unwrap()).unwrap();
    assert_eq!(report["all_pass"], false);
    assert_eq!(cbridge(&["sample", "--x", "3", "--y", "1"], d.path()), 2);
    assert_eq!(cbridge(&["mean-curve", "--model", "missing.json"], d.path()), 2);
    assert_eq!(cbridge(&["mean-curve", "--step", "0.5"], d.path()), 2);
    let bad = model(d.path(), "bad.json", r#"{"family":"poisson","params":{"alpha":-1.0}}"#);
    assert_eq!(cbridge(&["characteristics", "--model", &bad], d.path()), 2);
    assert_eq!(cbridge(&["nonsense"], d.path()), 2);
    assert_eq!(cbridge(&[], d.path()), 2);
}

#[test]
fn default_verify_suite_on_poisson_passes() {
    let d = tempfile::tempdir().unwrap();
    let p = model(d.path(), "p.json", r#"{"family":"poisson","params":{"alpha":1.0}}"#);
    assert_eq!(cbridge(&["verify", "--model", &p, "--y", "6", "--replicas", "20000"], d.path()), 0);
}

#[test]
fn manifest_replay_is_byte_identical() {
    let d = tempfile::tempdir().unwrap();
    for (args, files) in [
        (vec!["sample", "--lambda", "-1.5", "--y", "7", "--replicas", "500", "--seed", "9", "--out", "a"], vec!["paths.csv", "summary.json"]),
        (vec!["marginals", "--lambda", "2", "--y", "5", "--out", "a"], vec!["marginals.csv"]),
        (vec!["lln", "--n-list", "10,20", "--replicas", "30", "--out", "a"], vec!["lln.csv", "lln.json"]),
    ] {
        assert_eq!(cbridge(&args, d.path()), 0);
        assert_eq!(cbridge(&["--manifest", "a/manifest.json", "--replay-out", "b"], d.path()), 0);
        for f in files.iter().chain(&["manifest.json"]) {
            let x = std::fs::read(d.path().join("a").join(f)).unwrap();
            let y = std::fs::read(d.path().join("b").join(f)).unwrap();
            assert_eq!(x, y, "{f} differs after replay");
        }
    }
}
