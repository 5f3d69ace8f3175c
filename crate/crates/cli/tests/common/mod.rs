#![allow(dead_code)]

use std::path::{Path, PathBuf};

use lindbladlab_cli::{Scenario, ScenarioConfig};
use serde_json::Value;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn load(name: &str, scenario: Scenario) -> ScenarioConfig {
    ScenarioConfig::load(&fixture(name), scenario).unwrap()
}

pub fn schema() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/report-v1.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

pub fn assert_schema_valid(json: &str) {
    let value: Value = serde_json::from_str(json).unwrap();
    let errors: Vec<String> = schema().iter_errors(&value).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "schema violations: {errors:#?}");
}

/// Compares two reports field by field, ignoring timings. Numbers agree
/// to `tol` absolutely or relatively; everything else must match exactly.
/// Returns the paths of differing fields.
pub fn diff_reports(a: &Value, b: &Value, tol: f64) -> Vec<String> {
    let mut out = Vec::new();
    walk(a, b, "", tol, &mut out);
    out
}

fn walk(a: &Value, b: &Value, path: &str, tol: f64, out: &mut Vec<String>) {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            for key in x.keys().chain(y.keys().filter(|k| !x.contains_key(*k))) {
                if key == "timings" && path.is_empty() {
                    continue;
                }
                let sub = format!("{path}.{key}");
                match (x.get(key), y.get(key)) {
                    (Some(u), Some(v)) => walk(u, v, &sub, tol, out),
                    _ => out.push(format!("{sub}: present on one side only")),
                }
            }
        }
        (Value::Array(x), Value::Array(y)) => {
            if x.len() != y.len() {
                out.push(format!("{path}: length {} vs {}", x.len(), y.len()));
                return;
            }
            for (i, (u, v)) in x.iter().zip(y).enumerate() {
                walk(u, v, &format!("{path}[{i}]"), tol, out);
            }
        }
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            if (x - y).abs() > tol * x.abs().max(y.abs()).max(1.0) {
                out.push(format!("{path}: {x:e} vs {y:e}"));
            }
        }
        _ => {
            if a != b {
                out.push(format!("{path}: {a} vs {b}"));
            }
        }
    }
}
