use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catint")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn temp_config(name: &str, body: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("catint-{}-{name}.json", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn integrate_identity_is_one_half() {
    let out = run(&["integrate", "--function", "x1", "--measure", "lebesgue", "--levels", "4:16", "--tol", "1e-6"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["value"], "1/2");
    assert_eq!(v["converged"], true);
}

#[test]
fn integrate_float_backend_prints_a_number() {
    let out = run(&["integrate", "--function", "x1*x2", "--dim", "2", "--backend", "float"]);
    assert_eq!(code(&out), 0);
    assert!((json(&out)["value"].as_f64().unwrap() - 0.25).abs() < 1e-9);
}

#[test]
fn integrate_against_squared_distribution() {
    let out = run(&["integrate", "--function", "x1", "--measure", "x^2", "--backend", "float"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!((json(&out)["value"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-5);
}

#[test]
fn step_literal_is_exact() {
    let out = run(&["integrate", "--function", "step:1,1,3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["value"], "2");
    assert_eq!(v["level_reached"], 1);
}

#[test]
fn fourier_of_square_wave() {
    let out = run(&["fourier", "--function", "step:1,1,-1", "--k", "1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert!(v["re"].as_f64().unwrap().abs() < 1e-6);
    assert!((v["im"].as_f64().unwrap() + 2.0 / std::f64::consts::PI).abs() < 1e-6);
}

#[test]
fn fourier_rejects_rational_backend() {
    let out = run(&["fourier", "--function", "x1", "--backend", "rational"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).starts_with("error:"));
}

#[test]
fn antiderive_step_literal() {
    let out = run(&["antiderive", "--function", "step:2,1,2,3,4"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["value"], serde_json::json!(["0", "1/4", "3/4", "3/2", "5/2"]));
}

#[test]
fn antiderive_rejects_non_lebesgue() {
    let out = run(&["antiderive", "--function", "x1", "--measure", "x^2"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn differentiate_breakpoints() {
    let out = run(&["differentiate", "--function", "pl:2,0,1,1,3,3"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(json(&out)["value"], serde_json::json!(["4", "0", "8", "0"]));
}

#[test]
fn polynomial_norm() {
    let out = run(&["integrate", "--function", "poly:-1,2", "--p", "1"]);
    assert_eq!(code(&out), 0);
    assert!((json(&out)["value"].as_f64().unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn table_is_csv_with_empty_first_residual() {
    let out = run(&["table", "--function", "x1*x1", "--levels", "0:2"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["level,value,residual", "0,1/4,", "1,5/16,0.0625", "2,21/64,0.015625"]);
}

#[test]
fn non_convergence_exits_two() {
    let out = run(&["integrate", "--function", "x1", "--measure", "x^2", "--levels", "2:4"]);
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["converged"], false);
}

#[test]
fn parse_error_reports_position() {
    let out = run(&["integrate", "--function", "x1 + x3", "--dim", "2"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("position 5"), "{}", stderr(&out));
}

#[test]
fn bad_flags_exit_one() {
    assert_eq!(code(&run(&["integrate", "--levels", "9:2", "--function", "x1"])), 1);
    assert_eq!(code(&run(&["integrate", "--function", "x1", "--backend", "complex"])), 1);
    assert_eq!(code(&run(&["integrate", "--bogus"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["integrate", "--help"])), 0);
}

#[test]
fn verify_passes_and_reports_totals() {
    let out = run(&["verify", "--cases", "2", "--seed", "7"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().last().unwrap().starts_with("total:"));
    assert!(text.contains("squares:"));
}

#[test]
fn verify_unknown_suite_exits_one() {
    assert_eq!(code(&run(&["verify", "--suite", "nope"])), 1);
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "--suite", "linearity", "--cases", "5", "--seed", "3"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = ["fourier", "--function", "x1*x1", "--k", "2"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn config_file_with_flag_override() {
    let path = temp_config("override", r#"{"function": "x1*x2", "dim": 2, "measure": {"kind": "lebesgue"}}"#);
    let p = path.to_str().unwrap();
    assert_eq!(json(&run(&["integrate", "--config", p]))["value"], "1/4");
    assert_eq!(json(&run(&["integrate", "--config", p, "--function", "x1"]))["value"], "1/2");
    std::fs::remove_file(path).unwrap();
}

#[test]
fn config_with_algebra_and_tau() {
    let path = temp_config(
        "algebra",
        r#"{
            "function": "x1",
            "algebra": {
                "basis": ["1", "e"],
                "structure": [[[1, 0], [0, 1]], [[0, 1], [0, 0]]],
                "unit": [1, 0],
                "tau": [1, 0]
            }
        }"#,
    );
    let out = run(&["integrate", "--config", path.to_str().unwrap()]);
    std::fs::remove_file(path).unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(json(&out)["value"], "1/2");
}

#[test]
fn malformed_config_exits_one() {
    let path = temp_config("bad", r#"{"function": "x1", "unknown_key": 1}"#);
    let out = run(&["integrate", "--config", path.to_str().unwrap()]);
    std::fs::remove_file(path).unwrap();
    assert_eq!(code(&out), 1);
}

#[test]
fn weight_selects_direct_sum_norm() {
    let printed = json(&run(&["integrate", "--function", "step:1,1,3", "--p", "2"]));
    let average = json(&run(&["integrate", "--function", "step:1,1,3", "--p", "2", "--weight", "leinster"]));
    assert!((printed["value"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-12);
    assert!((printed["step_norm"].as_f64().unwrap() - 2.5f64.sqrt()).abs() < 1e-12);
    assert!((printed["split_norm"].as_f64().unwrap() - 10f64.sqrt()).abs() < 1e-12);
    assert!((average["split_norm"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-12);
    assert_eq!(code(&run(&["integrate", "--function", "x1", "--weight", "heavy"])), 1);
}
