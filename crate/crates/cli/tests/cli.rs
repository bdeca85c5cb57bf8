use std::path::PathBuf;
use std::process::Command;

use gdiff_cli::problem::BackendKind;
use gdiff_cli::scalar::CliScalar;
use gdiff_cli::{load, run, CliError, Options, Status};
use gdiff_core::{Complex64, Rational};
use serde_json::Value;

fn problem(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("problems").join(name).to_string_lossy().into_owned()
}

fn gdiff(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gdiff")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

const MINIMAL: &str = r#"{
  "space": ["x1", "x2", "x3"],
  "group": [{ "name": "s", "cycles": "(x1 x3 x2)" }, { "name": "t", "cycles": "(x2 x3)" }],
  "equations": { "one": { "kind": "trivial" } },
  "tasks": [{ "task": "solve", "source": "one", "target": "one", "expect_dim": 1 }]
}"#;

#[test]
fn solve_trivial_has_dimension_one() {
    let report = run(&load(MINIMAL).unwrap(), &Options::default()).unwrap();
    assert!(report.passed);
    assert_eq!(report.tasks[0].result["dim"], 1);
}

#[test]
fn unknown_keys_are_rejected_with_a_position() {
    let text = MINIMAL.replace("\"expect_dim\": 1", "\"expect_dim\": 1, \"extra\": true");
    let err = load(&text).unwrap_err();
    assert!(matches!(err, CliError::Parse(_)));
    assert!(err.to_string().contains("unknown field `extra`"), "{err}");
    assert!(err.to_string().contains("line 5"), "{err}");
}

#[test]
fn undefined_and_cyclic_references_are_config_errors() {
    let text = MINIMAL.replace("\"target\": \"one\"", "\"target\": \"two\"");
    let err = load(&text).unwrap_err();
    assert!(matches!(err, CliError::Config(ref m) if m.contains("\"two\"")), "{err}");

    let text = MINIMAL.replace(
        r#""one": { "kind": "trivial" }"#,
        r#""one": { "kind": "dual", "of": "two" }, "two": { "kind": "sym2", "of": "one" }"#,
    );
    let err = load(&text).unwrap_err();
    assert!(matches!(err, CliError::Config(ref m) if m.contains("cycle")), "{err}");
}

#[test]
fn task_errors_do_not_stop_later_tasks() {
    let text = MINIMAL.replace(
        r#""tasks": ["#,
        r#""tasks": [{ "task": "project", "equation": "one", "character": "nonexistent" },"#,
    );
    let report = run(&load(&text).unwrap(), &Options::default()).unwrap();
    assert_eq!(report.tasks[0].status, Status::Error);
    assert_eq!(report.tasks[1].status, Status::Pass);
    assert!(!report.passed);
}

#[test]
fn exit_codes() {
    let (code, out, _) = gdiff(&["run", &problem("s3_structure.json")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("[pass] 1 solve(one, one): dim 1"));

    let (code, out, _) = gdiff(&["run", &problem("s3_alternating_sum.json")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("[pass] 0 assert_zero_action(alternating_sum)"));

    let (code, out, _) = gdiff(&["run", &problem("s3_inconsistent.json")]);
    assert_eq!(code, 1);
    assert!(out.contains("InconsistentConnection"), "{out}");
    let (code, out, _) = gdiff(&["validate", &problem("s3_inconsistent.json")]);
    assert_eq!(code, 1);
    assert!(out.contains("[invalid] equation broken"), "{out}");

    let dir = std::env::temp_dir().join(format!("gdiff-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{ \"space\": [\"a\"], \"group\": [], \"colour\": 1 }").unwrap();
    let (code, _, err) = gdiff(&["run", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown field"), "{err}");
    let (code, _, _) = gdiff(&["run", dir.join("missing.json").to_str().unwrap()]);
    assert_eq!(code, 2);
    let (code, _, _) = gdiff(&["run", &problem("s3_structure.json"), "--epsilon", "-1"]);
    assert_eq!(code, 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn structured_reports_are_byte_identical_and_order_preserving() {
    let path = problem("s3_structure.json");
    let (_, a, _) = gdiff(&["run", &path, "--format", "structured", "--seed", "5"]);
    let (_, b, _) = gdiff(&["run", &path, "--format", "structured", "--seed", "5"]);
    let (_, c, _) = gdiff(&["run", &path, "--format", "structured", "--seed", "5", "--parallel"]);
    assert_eq!(a, b);
    assert_eq!(a, c);
    let report: Value = serde_json::from_str(&a).unwrap();
    let indices: Vec<u64> = report["tasks"].as_array().unwrap().iter().map(|t| t["index"].as_u64().unwrap()).collect();
    assert_eq!(indices, (0..indices.len() as u64).collect::<Vec<_>>());
}

#[test]
fn output_flag_writes_the_report() {
    let out = std::env::temp_dir().join(format!("gdiff-report-{}.json", std::process::id()));
    let (code, stdout, _) = gdiff(&["run", &problem("c6_laplacian.json"), "--format", "structured", "--output", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["tasks"][0]["result"]["dim"], 1);
    std::fs::remove_file(out).unwrap();
}

fn scalars(v: &Value, out: &mut Vec<Value>) {
    match v {
        Value::String(s) if s.chars().all(|c| c.is_ascii_digit() || c == '/' || c == '-') => out.push(v.clone()),
        Value::Array(a) if a.len() == 2 && a.iter().all(Value::is_f64) => out.push(v.clone()),
        Value::Array(a) => a.iter().for_each(|x| scalars(x, out)),
        Value::Object(m) => m.values().for_each(|x| scalars(x, out)),
        _ => {}
    }
}

#[test]
fn report_scalars_round_trip() {
    let file = gdiff_cli::read(&problem("s3_structure.json")).unwrap();
    let report = run(&file, &Options::default()).unwrap();
    let mut found = Vec::new();
    scalars(&serde_json::to_value(&report).unwrap(), &mut found);
    assert!(found.len() > 50);
    for v in found {
        assert_eq!(Rational::parse(&v).unwrap().to_json(), v);
    }

    let file = gdiff_cli::read(&problem("d8_projection.json")).unwrap();
    let report = run(&file, &Options::default()).unwrap();
    let mut found = Vec::new();
    scalars(&serde_json::to_value(&report).unwrap(), &mut found);
    assert!(!found.is_empty());
    for v in found {
        assert_eq!(Complex64::parse(&v).unwrap().to_json(), v);
    }
}

#[test]
fn backend_override_switches_field() {
    let file = load(MINIMAL).unwrap();
    let report = run(&file, &Options { backend: Some(BackendKind::Complex), ..Options::default() }).unwrap();
    assert_eq!(report.backend, "complex");
    assert!(report.passed);
    let matrix = &report.tasks[0].result["morphisms"][0][0];
    assert_eq!(matrix, &serde_json::json!([[[1.0, 0.0]]]));
}
