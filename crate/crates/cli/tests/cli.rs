use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poisson-cohomology"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn validate(schema: &str, instance: &Value) {
    let path = root().join("schemas").join(schema);
    let text = std::fs::read_to_string(&path).expect("schema file");
    let schema: Value = serde_json::from_str(&text).expect("schema is json");
    let v = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = v.iter_errors(instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema}: {errors:?}");
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = bin(&all);
    (
        code(&o),
        serde_json::from_str(&stdout(&o)).expect("json output"),
    )
}

const L4_11: [&str; 6] = ["--structure", "lambda4", "--param", "a=1", "--param", "b=1"];

fn with<'a>(head: &[&'a str], tail: &[&'a str]) -> Vec<&'a str> {
    head.iter().chain(tail).copied().collect()
}

#[test]
fn check_lambda4_passes() {
    let o = bin(&with(&["check"], &L4_11));
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().last().unwrap().starts_with("PASS"));
}

#[test]
fn check_every_family_passes() {
    for args in [
        vec![
            "check",
            "--structure",
            "lambda8",
            "--param",
            "b=1",
            "--param",
            "c=1",
            "--sign",
            "minus",
            "--t-max",
            "3",
        ],
        vec![
            "check",
            "--structure",
            "lambda11",
            "--param",
            "a=2/3",
            "--param",
            "b=-1",
            "--t-max",
            "3",
        ],
    ] {
        assert_eq!(code(&bin(&args)), 0, "{args:?}");
    }
}

#[test]
fn parameter_errors_exit_two() {
    for args in [
        vec![
            "check",
            "--structure",
            "lambda4",
            "--param",
            "a=0",
            "--param",
            "b=1",
        ],
        vec![
            "check",
            "--structure",
            "lambda8",
            "--param",
            "b=1",
            "--param",
            "c=-2",
        ],
        vec![
            "check",
            "--structure",
            "lambda4",
            "--param",
            "a=0.5",
            "--param",
            "b=1",
        ],
        vec!["check", "--structure", "lambda4", "--param", "a=1"],
        vec!["check", "--structure", "lambda9", "--param", "a=1"],
        vec![
            "verify",
            "--theorem",
            "thm3",
            "--structure",
            "lambda4",
            "--param",
            "a=1",
            "--param",
            "b=1",
        ],
        vec![
            "specseq",
            "--structure",
            "lambda4",
            "--param",
            "a=1",
            "--param",
            "b=1",
            "--t-max",
            "2",
            "--pages",
            "0..9",
        ],
    ] {
        let o = bin(&args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn verify_theorems_pass() {
    let o = bin(&with(
        &["verify", "--theorem", "thm2", "--t-max", "12"],
        &L4_11,
    ));
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = bin(&[
        "verify",
        "--theorem",
        "thm3",
        "--structure",
        "lambda8",
        "--param",
        "b=-1",
        "--param",
        "c=4",
        "--sign",
        "plus",
        "--t-max",
        "12",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = bin(&with(
        &["verify", "--theorem", "thm1", "--n", "2", "--t-max", "7"],
        &L4_11,
    ));
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn cohomology_matches_golden() {
    let o = bin(&with(
        &["cohomology", "--t-max", "6", "--format", "json"],
        &L4_11,
    ));
    assert_eq!(code(&o), 0);
    let golden = std::fs::read_to_string(
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/lambda4_a1_b1_t6.json"),
    )
    .expect("golden file");
    assert_eq!(stdout(&o), golden);
}

#[test]
fn t_max_zero_has_one_row() {
    let (c, v) = json(&with(&["cohomology", "--t-max", "0"], &L4_11));
    assert_eq!(c, 0);
    let entries = v["entries"].as_array().unwrap();
    assert!(entries.iter().all(|e| e["weight"] == 0));
    assert_eq!(entries.len(), 4);
}

#[test]
fn lambda11_carries_note() {
    let (c, v) = json(&[
        "cohomology",
        "--structure",
        "lambda11",
        "--param",
        "a=1",
        "--param",
        "b=1",
    ]);
    assert_eq!(c, 0);
    assert!(v["note"].is_string());
    validate("cohomology_table.schema.json", &v);
}

#[test]
fn json_outputs_follow_schemas() {
    let (_, v) = json(&with(
        &["cohomology", "--t-max", "3", "--dump-reps"],
        &L4_11,
    ));
    validate("cohomology_table.schema.json", &v);

    let (c, v) = json(&with(
        &["specseq", "--t-max", "3", "--pages", "1..3", "--dump-reps"],
        &L4_11,
    ));
    assert_eq!(c, 0);
    for page in v["pages"]
        .as_array()
        .unwrap()
        .iter()
        .chain(v["limit"].as_array().unwrap())
    {
        validate("page.schema.json", page);
    }
    assert!(v["limit"]
        .as_array()
        .unwrap()
        .iter()
        .all(|p| p["page"].is_null()));
    validate("verify_report.schema.json", &v["comparison"]);

    let (_, v) = json(&with(&["check", "--t-max", "2"], &L4_11));
    validate("verify_report.schema.json", &v);
    let (_, v) = json(&with(
        &["verify", "--theorem", "prop2", "--t-max", "4"],
        &L4_11,
    ));
    validate("verify_report.schema.json", &v);

    for theorem in ["prop2", "thm1", "thm2"] {
        let (c, v) = json(&with(
            &[
                "verify",
                "--predicted",
                "--theorem",
                theorem,
                "--t-max",
                "6",
            ],
            &L4_11,
        ));
        assert_eq!(c, 0);
        validate("predicted_table.schema.json", &v);
    }
    let (_, v) = json(&[
        "verify",
        "--predicted",
        "--theorem",
        "thm3",
        "--structure",
        "lambda8",
        "--param",
        "b=1",
        "--param",
        "c=1",
        "--sign",
        "minus",
    ]);
    validate("predicted_table.schema.json", &v);
}

#[test]
fn output_is_deterministic() {
    for fmt in ["table", "json"] {
        let run = |jobs: &str| {
            stdout(&bin(&with(
                &[
                    "specseq",
                    "--t-max",
                    "4",
                    "--pages",
                    "0..4",
                    "--dump-reps",
                    "--format",
                    fmt,
                    "--jobs",
                    jobs,
                ],
                &L4_11,
            )))
        };
        let first = run("1");
        assert_eq!(first, run("1"));
        assert_eq!(first, run("4"));
    }
}
