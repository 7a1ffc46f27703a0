//! Byte-stable JSON report for a fixed configuration.
//! Set `UPDATE_GOLDEN=1` to rewrite the stored file.

use std::path::PathBuf;

use pearson_core::report::{parse_json, run_suite, to_json, SuiteConfig};
use pearson_core::HypergeometricWeight;
use rug::Rational;

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/charlier_default.json")
}

fn render() -> String {
    let w = HypergeometricWeight::charlier(Rational::from((7, 10)));
    let report = run_suite(&SuiteConfig::new(w, 12)).unwrap();
    assert!(report.pass, "failing: {:?}", report.failures());
    to_json(&report).unwrap()
}

#[test]
fn charlier_default_report() {
    let json = render();
    let path = golden_path();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &json).unwrap();
    }
    let stored = std::fs::read_to_string(&path).expect("golden file; run with UPDATE_GOLDEN=1");
    assert_eq!(json, stored);
    let rec = parse_json(&stored).unwrap();
    assert_eq!(rec.size, 12);
    assert!(rec.checks.iter().all(|c| c.pass));
}

#[test]
fn repeated_runs_are_identical() {
    assert_eq!(render(), render());
}
