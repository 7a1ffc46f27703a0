//! End-to-end runs of the `pearson` binary.

use std::process::{Command, Output};

fn pearson(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pearson")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn recurrence_prints_charlier_coefficients() {
    let o = pearson(&["recurrence", "--weight", "eta=0.7", "--size", "5", "--digits", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let rows: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 5);
    for (n, row) in rows.iter().enumerate() {
        let beta: f64 = row[1].parse().unwrap();
        let gamma: f64 = row[2].parse().unwrap();
        assert!((beta - (n as f64 + 0.7)).abs() < 1e-9, "{row:?}");
        assert!((gamma - 0.7 * n as f64).abs() < 1e-9, "{row:?}");
    }
}

#[test]
fn moments_of_meixner() {
    let o = pearson(&["moments", "--weight", "a=1; eta=1/2", "--max", "2", "--digits", "8"]);
    assert_eq!(o.status.code(), Some(0));
    // (1 - eta)^{-1} = 2, rho_1 = 2, rho_2 = 6
    let vals: Vec<f64> = stdout(&o).lines().map(|l| l.split(" = ").nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(vals.len(), 3);
    for (v, e) in vals.iter().zip([2.0, 2.0, 6.0]) {
        assert!((v - e).abs() < 1e-6);
    }
}

#[test]
fn divergent_weight_exits_one() {
    let o = pearson(&["moments", "--weight", "a=1; eta=2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("diverges"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(pearson(&["verify"]).status.code(), Some(2));
    assert_eq!(pearson(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(pearson(&["verify", "--weight", "eta=oops"]).status.code(), Some(2));
    assert_eq!(pearson(&["verify", "--weight", "eta=1/2", "--checks", "nope"]).status.code(), Some(2));
    assert_eq!(pearson(&["verify", "--weight", "eta=1/2", "--tol", "0"]).status.code(), Some(2));
    // gram_pearson needs an undeformed weight
    let o = pearson(&["verify", "--weight", "eta=1/2; eta2=0.9; eta3=0.9", "--checks", "gram_pearson"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_passes_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = pearson(&[
        "verify",
        "--weight",
        "a=3/2; b=5/2; eta=1/3",
        "--size",
        "8",
        "--bits",
        "256",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().skip(1).all(|l| l.starts_with("PASS")));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["size"], 8);
    assert!(v["checks"].as_array().unwrap().len() > 10);
}

#[test]
fn impossible_tolerance_fails_with_one() {
    let o = pearson(&["verify", "--weight", "eta=0.7", "--size", "6", "--checks", "toda", "--tol", "2^-1000"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL toda"));
}

#[test]
fn csv_to_stdout() {
    let o = pearson(&["toda", "--weight", "eta=0.7", "--size", "6", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("name,max_residual,scale,tolerance,pass"));
    let names: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(names, ["tau_routes", "toda", "sato_wilson", "pearson_toda"]);
}

#[test]
fn lattice_and_kp_presets() {
    let o = pearson(&["lattice", "--weight", "a=1,2; b=3; eta=1/4", "--size", "8", "--pairs", "A1:A2", "--nmax", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS nijhoff_capel"));
    let o = pearson(&["kp", "--weight", "eta=1/2; eta2=0.9; eta3=0.9"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS kp"));
}

#[test]
fn config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "# charlier\nweight = eta=7/10\nsize = 6\nchecks = recurrence, toda\n").unwrap();
    let o = pearson(&["verify", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("PASS recurrence") && out.contains("PASS toda"));
}
