use std::path::{Path, PathBuf};
use std::process::Command;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

fn cramer(args: &[&str]) -> i32 {
    let out = Command::new(env!("CARGO_BIN_EXE_cramer")).args(args).output().expect("spawn");
    out.status.code().expect("exit code")
}

fn spec_file(dir: &Path, body: &str) -> String {
    let p = dir.join("spec.json");
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn verify_defaults_pass_for_bernoulli() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let code = cramer(&["verify", "--spec", corpus("bernoulli.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("report.json")).unwrap()).unwrap();
    assert!(report.as_array().unwrap().iter().all(|r| r["passed"] == true));
    assert!(out.join("manifest.json").exists());
}

#[test]
fn decay_of_rademacher_at_origin_vanishes_at_odd_n() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let code = cramer(&[
        "decay",
        "--spec",
        corpus("rademacher.json").to_str().unwrap(),
        "--set",
        corpus("origin.json").to_str().unwrap(),
        "--n-max",
        "40",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(out.join("decay.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let (n, v) = line.split_once(',').unwrap();
        let n: usize = n.parse().unwrap();
        assert_eq!(v == "-inf", n % 2 == 1, "{line}");
    }
    let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("decay.json")).unwrap()).unwrap();
    assert_eq!(summary["k_C"], 2);
}

#[test]
fn gaussian_rate_at_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let code = cramer(&["rate", "--spec", corpus("gaussian.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(out.join("rate.csv")).unwrap();
    let v: f64 = csv
        .lines()
        .find_map(|l| l.strip_prefix("1,"))
        .expect("x = 1 row")
        .parse()
        .unwrap();
    assert!((v + 0.5).abs() < 1e-9, "{v}");
}

#[test]
fn monte_carlo_runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        let code = cramer(&["entropy", "--spec", corpus("gaussian2d.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0);
        ["entropy.csv", "entropy.json", "manifest.json"].map(|f| std::fs::read(out.join(f)).unwrap())
    };
    assert_eq!(run("a"), run("b"));
    let other = dir.path().join("c");
    let code = cramer(&[
        "entropy",
        "--spec",
        corpus("gaussian2d.json").to_str().unwrap(),
        "--seed",
        "7",
        "--out",
        other.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_ne!(std::fs::read(other.join("entropy.json")).unwrap(), run("d")[1]);
}

#[test]
fn unknown_key_is_invalid_input() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(
        dir.path(),
        r#"{"distribution": {"type": "gaussian", "mean": [0], "var": [1]}, "sede": 4}"#,
    );
    assert_eq!(cramer(&["verify", "--spec", &spec, "--out", dir.path().join("o").to_str().unwrap()]), 2);
}

#[test]
fn oversized_grid_exceeds_budget() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(dir.path(), r#"{"distribution": {"type": "gaussian", "mean": [0,0,0], "var": [1,1,1]}}"#);
    let code = cramer(&[
        "rate",
        "--spec",
        &spec,
        "--primal",
        "[-1,1]x2000×[-1,1]x2000×[-1,1]x2000",
        "--dual",
        "[-1,1]x3×[-1,1]x3×[-1,1]x3",
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(code, 3);
}

#[test]
fn impossible_tolerance_fails_checks() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(
        dir.path(),
        r#"{"distribution": {"type": "atomic", "atoms": [{"point": [0], "weight": 0.5}, {"point": [1], "weight": 0.5}]},
            "verify": {"checks": ["duality"], "tolerance": 1e-9}}"#,
    );
    assert_eq!(cramer(&["verify", "--spec", &spec, "--out", dir.path().join("o").to_str().unwrap()]), 1);
}
