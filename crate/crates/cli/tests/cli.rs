use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aniso-robin"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_radial_disk() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["solve-radial", "--p", "2", "--n", "2", "--R", "1", "--beta", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&dir.path().join("radial.json"));
    let ell1 = v["ell1"].as_f64().unwrap();
    assert!((ell1 - 1.576_992_730_808_606_9).abs() < 1e-8, "{ell1}");
    let csv = std::fs::read_to_string(dir.path().join("radial.csv")).unwrap();
    assert!(csv.lines().count() > 100);
}

#[test]
fn zero_beta_reports_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["solve-domain", "--domain", "square", "--beta", "0", "--h", "0.1"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("degenerate=true"));
    let v = read_json(&dir.path().join("eigen.json"));
    assert!(v["ell1"].as_f64().unwrap().abs() <= 1e-8);
}

#[test]
fn anisotropic_domain_solve_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["solve-domain", "--domain", "hexagon", "--norm", "ellipse:4,0,1", "--p", "3", "--beta", "2", "--h", "0.1"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&dir.path().join("eigen.json"));
    let ell1 = v["ell1"].as_f64().unwrap();
    assert!(ell1 > 0.0 && ell1 <= v["mean_bound"].as_f64().unwrap() + 1e-9);
}

#[test]
fn radial_suite_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run(a.path(), &["--jobs", "1", "verify-suite", "--preset", "radial", "--seed", "3"]).status.success());
    assert!(run(b.path(), &["--jobs", "3", "verify-suite", "--preset", "radial", "--seed", "3"]).status.success());
    for f in ["suite.json", "suite.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn paper_core_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify-suite", "--preset", "paper-core", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v = read_json(&dir.path().join("suite.json"));
    assert_eq!(v["summary"]["failed"], 0);
}

#[test]
fn impossible_gate_fails_strict_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["verify-suite", "--preset", "paper-core", "--h", "0.1", "--gate-tol", "1e-12", "--strict"],
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_input_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["solve-radial", "--p", "0.5", "--R", "1", "--beta", "1"],
        &["solve-radial", "--p", "2", "--R", "-1", "--beta", "1"],
        &["solve-domain", "--domain", "no-such-domain"],
        &["solve-domain", "--norm", "qnorm:0.5"],
        &["verify-suite", "--preset", "nope"],
        &["frobnicate"],
    ];
    for args in cases {
        assert_eq!(run(dir.path(), args).status.code(), Some(3), "{args:?}");
    }
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_aniso-robin"))
        .env("ANISO_ROBIN_OUT", dir.path())
        .args(["solve-radial", "--p", "3", "--R", "2", "--beta", "0.5"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("radial.json").exists());
}
