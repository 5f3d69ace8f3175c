//! Chain reports checked in under `tests/golden`. Set `LINDBLADLAB_BLESS=1`
//! to rewrite them after an intentional change.

mod common;

use std::path::Path;

use common::{assert_schema_valid, diff_reports, load};
use lindbladlab_cli::{run_scenario, Scenario};
use serde_json::Value;

fn check(config: &str, golden: &str) {
    let report = run_scenario(&load(config, Scenario::Chain)).unwrap();
    let json = report.to_json();
    assert_schema_valid(&json);
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(golden);
    if std::env::var_os("LINDBLADLAB_BLESS").is_some() {
        std::fs::write(&path, report.without_timings().to_json()).unwrap();
    }
    let expected: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let actual: Value = serde_json::from_str(&json).unwrap();
    let diff = diff_reports(&expected, &actual, 1e-12);
    assert!(diff.is_empty(), "{golden} differs: {diff:#?}");
}

#[test]
fn chain_length_two() {
    check("chain_l2.toml", "chain_l2.json");
}

#[test]
fn chain_length_three() {
    check("chain_l3.toml", "chain_l3.json");
}
