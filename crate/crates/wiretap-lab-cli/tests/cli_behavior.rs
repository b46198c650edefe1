//! Black-box CLI checks: exit codes, byte-identical reruns, and schema
//! validation of every JSON-emitting subcommand against the shipped
//! schema files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wiretap-lab"))
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

// ---------------------------------------------------------------------------
// Minimal JSON-schema validator covering the subset the shipped schemas use:
// type (possibly a list), required, properties, items, additionalProperties.
// ---------------------------------------------------------------------------

fn type_matches(t: &str, v: &Value) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "integer" => v.is_i64() || v.is_u64(),
        "number" => v.is_number(),
        other => panic!("unsupported schema type {other}"),
    }
}

fn validate(schema: &Value, v: &Value, path: &str) -> Result<(), String> {
    if let Some(ty) = schema.get("type") {
        let allowed: Vec<&str> = match ty {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().map(|t| t.as_str().unwrap()).collect(),
            _ => return Err(format!("{path}: malformed type specifier")),
        };
        if !allowed.iter().any(|t| type_matches(t, v)) {
            return Err(format!("{path}: value {v} not of type {allowed:?}"));
        }
    }
    if let Some(obj) = v.as_object() {
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            for key in required {
                let key = key.as_str().unwrap();
                if !obj.contains_key(key) {
                    return Err(format!("{path}: missing required key {key}"));
                }
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        if let Some(props) = props {
            for (key, sub) in obj {
                if let Some(sub_schema) = props.get(key) {
                    validate(sub_schema, sub, &format!("{path}/{key}"))?;
                } else if schema.get("additionalProperties") == Some(&Value::Bool(false)) {
                    return Err(format!("{path}: unexpected key {key}"));
                }
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), v.as_array()) {
        for (i, item) in arr.iter().enumerate() {
            validate(items, item, &format!("{path}[{i}]"))?;
        }
    }
    Ok(())
}

fn assert_schema(schema_name: &str, output: &str) {
    let schema_path = schema_dir().join(format!("{schema_name}.schema.json"));
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(&schema_path).unwrap()).unwrap();
    let value: Value = serde_json::from_str(output)
        .unwrap_or_else(|e| panic!("{schema_name}: output is not JSON: {e}\n{output}"));
    if let Err(msg) = validate(&schema, &value, "$") {
        panic!("{schema_name}: schema violation: {msg}\noutput: {output}");
    }
}

#[test]
fn every_json_subcommand_validates_against_its_schema() {
    let bsc005 = fixture("bsc005.json");
    let bsc01 = fixture("bsc01.json");
    let uniform = fixture("uniform2.json");
    let skewed = fixture("skewed2.json");
    let joint = fixture("joint_2x3.json");
    let cases: Vec<(&str, Vec<&str>)> = vec![
        (
            "measures-renyi",
            vec!["measures", "renyi", "--p", &uniform, "--q", &skewed, "--s", "0.5"],
        ),
        (
            "measures-cond-renyi",
            vec!["measures", "cond-renyi", "--joint", &joint, "--s", "1"],
        ),
        (
            "measures-mutual",
            vec!["measures", "mutual", "--p", &uniform, "--channel", &bsc01],
        ),
        ("measures-maxinfo", vec!["measures", "maxinfo", "--channel", &bsc01]),
        (
            "measures-smooth-maxinfo",
            vec![
                "measures",
                "smooth-maxinfo",
                "--channel",
                &bsc01,
                "--epsilon",
                "0.2",
            ],
        ),
        ("measures-lemma8", vec!["measures", "lemma8", "--channel", &bsc01]),
        (
            "measures-lemma9",
            vec!["measures", "lemma9", "--channel", &bsc01, "--epsilon", "0.1"],
        ),
        ("channel-capacity", vec!["channel", "capacity", "--channel", &bsc01]),
        ("channel", vec!["channel", "compose", "--v", &bsc005, "--w", &bsc01]),
        ("channel", vec!["channel", "extend", "--channel", &bsc01, "--n", "2"]),
        ("channel-validate", vec!["channel", "validate", "--channel", &bsc01]),
        (
            "typicality-bounds",
            vec![
                "typicality",
                "bounds",
                "--n",
                "10",
                "--delta",
                "0.1",
                "--p",
                &uniform,
                "--channel",
                &bsc01,
            ],
        ),
        (
            "typicality-enumerate",
            vec![
                "typicality",
                "enumerate",
                "--p",
                &uniform,
                "--n",
                "6",
                "--delta",
                "0.1",
                "--list",
            ],
        ),
        (
            "typicality-theorem1",
            vec![
                "typicality", "theorem1", "--channel", &bsc01, "--n", "4", "--delta", "0.1",
            ],
        ),
        (
            "typicality-remark1",
            vec![
                "typicality", "remark1", "--channel", &bsc01, "--n", "100", "--delta", "0.1",
            ],
        ),
        (
            "hash-collision",
            vec!["hash", "collision", "--k", "2", "--m", "1", "--exact"],
        ),
        (
            "hash-lemma10",
            vec!["hash", "lemma10", "--joint", &joint, "--m", "1", "--s", "0.5"],
        ),
        (
            "wiretap-build",
            vec![
                "wiretap", "build", "--v", &bsc005, "--w", &bsc01, "--n", "3", "--k", "2",
                "--m", "1",
            ],
        ),
        (
            "wiretap-error",
            vec![
                "wiretap", "error", "--v", &bsc005, "--w", &bsc01, "--n", "3", "--k", "2",
                "--m", "1",
            ],
        ),
        (
            "wiretap-error",
            vec![
                "wiretap", "error", "--v", &bsc005, "--w", &bsc01, "--n", "3", "--k", "2",
                "--m", "1", "--method", "mc", "--trials", "500",
            ],
        ),
        (
            // delta = 0 at odd n leaves the typical set empty; ln_size
            // degrades to the "-inf" flag and must still validate
            "typicality-enumerate",
            vec![
                "typicality", "enumerate", "--p", &uniform, "--n", "5", "--delta", "0",
            ],
        ),
        (
            "wiretap-leakage",
            vec![
                "wiretap", "leakage", "--v", &bsc005, "--w", &bsc01, "--n", "3", "--k", "2",
                "--m", "1",
            ],
        ),
        (
            "wiretap-thresholds",
            vec!["wiretap", "thresholds", "--v", &bsc005, "--w", &bsc01],
        ),
        (
            "wiretap-schedule",
            vec!["wiretap", "schedule", "--n", "100", "--gamma", "0.5"],
        ),
        (
            "wiretap-theorem2",
            vec![
                "wiretap", "theorem2", "--v", &bsc005, "--w", &bsc01, "--n", "3", "--k", "2",
                "--m", "1", "--L", "-16",
            ],
        ),
    ];
    for (schema, args) in cases {
        let out = run_ok(&args);
        assert_schema(schema, &out);
    }
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["measures", "maxinfo", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&[]).status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["measures", "--help"]).status.code(), Some(0));
}

#[test]
fn validation_errors_exit_two() {
    let bad = fixture("bad_rows.json");
    assert_eq!(
        run(&["channel", "validate", "--channel", &bad]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["channel", "capacity", "--channel", &fixture("nonexistent.json")])
            .status
            .code(),
        Some(2)
    );
    // gamma outside the open interval
    assert_eq!(
        run(&["wiretap", "schedule", "--n", "100", "--gamma", "1.0"])
            .status
            .code(),
        Some(2)
    );
    // eps beyond the Lemma-9 range
    assert_eq!(
        run(&[
            "measures",
            "lemma9",
            "--channel",
            &fixture("bsc01.json"),
            "--epsilon",
            "0.64"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn budget_errors_exit_three() {
    let out = run(&[
        "channel",
        "extend",
        "--channel",
        &fixture("bsc01.json"),
        "--n",
        "13",
        "--budget",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("budget"), "stderr should name the budget: {msg}");
}

#[test]
fn budget_env_variable_is_honored() {
    let out = bin()
        .args([
            "channel",
            "extend",
            "--channel",
            &fixture("bsc01.json"),
            "--n",
            "13",
        ])
        .env("WIRETAP_LAB_BUDGET", "1000")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn mismatched_format_is_rejected() {
    assert_eq!(
        run(&[
            "measures",
            "maxinfo",
            "--channel",
            &fixture("bsc01.json"),
            "--format",
            "csv"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "wiretap",
            "conjecture",
            "--v",
            &fixture("bsc005.json"),
            "--w",
            &fixture("bsc01.json"),
            "--n-list",
            "2",
            "--trials",
            "1",
            "--format",
            "json"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn explicit_codebook_build_and_leakage() {
    let out = run_ok(&[
        "wiretap",
        "leakage",
        "--v",
        &fixture("bsc005.json"),
        "--w",
        &fixture("bsc01.json"),
        "--n",
        "3",
        "--k",
        "2",
        "--m",
        "1",
        "--codebook",
        &fixture("codebook_n3_k2.json"),
    ]);
    assert_schema("wiretap-leakage", &out);
    // unknown symbol in the codebook is a validation error
    let bad = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(bad.path(), r#"[["0","0","2"],["0","1","1"],["1","0","1"],["1","1","0"]]"#)
        .unwrap();
    let status = run(&[
        "wiretap",
        "build",
        "--v",
        &fixture("bsc005.json"),
        "--w",
        &fixture("bsc01.json"),
        "--n",
        "3",
        "--k",
        "2",
        "--m",
        "1",
        "--codebook",
        bad.path().to_str().unwrap(),
    ])
    .status;
    assert_eq!(status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    run_ok(&[
        "measures",
        "maxinfo",
        "--channel",
        &fixture("bsc01.json"),
        "--out",
        path.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("0.587786665"));
}

#[test]
fn csv_outputs_have_header_and_lf_endings() {
    let out = run_ok(&[
        "wiretap",
        "schedule",
        "--gamma",
        "0.5",
        "--n-start",
        "10",
        "--n-end",
        "14",
    ]);
    assert!(out.starts_with("n,delta_n,eps_n,constraint_ratio\n"));
    assert!(!out.contains('\r'));
    assert_eq!(out.lines().count(), 6);

    let conj = run_ok(&[
        "wiretap",
        "conjecture",
        "--v",
        &fixture("bsc005.json"),
        "--w",
        &fixture("bsc01.json"),
        "--n-list",
        "2",
        "--trials",
        "2",
    ]);
    assert!(conj.starts_with("n,sqrt_n,gap_mean,gap_max,gap_over_sqrt_n,seed,trials\n"));
}

#[test]
fn exact_mode_invocations_are_byte_identical() {
    let bsc005 = fixture("bsc005.json");
    let bsc01 = fixture("bsc01.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["measures", "maxinfo", "--channel", &bsc01],
        vec!["channel", "capacity", "--channel", &bsc01],
        vec!["hash", "collision", "--k", "2", "--m", "1", "--exact"],
        vec![
            "wiretap", "leakage", "--v", &bsc005, "--w", &bsc01, "--n", "3", "--k", "2",
            "--m", "1", "--seed", "5",
        ],
        vec![
            "wiretap", "conjecture", "--v", &bsc005, "--w", &bsc01, "--n-list", "2,3",
            "--trials", "4", "--seed", "3",
        ],
    ];
    for args in cases {
        let first = run_ok(&args);
        let second = run_ok(&args);
        assert_eq!(first, second, "non-deterministic output for {args:?}");
    }
}
