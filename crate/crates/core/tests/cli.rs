//! Black-box tests of the command-line binary: exit codes, output headers,
//! determinism, and error reporting, exercised through real process spawns.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bundled(name: &str) -> String {
    format!("{}/../../problems/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bd-spectra"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn analyze_emits_csv_with_the_documented_header() {
    let out = run(&[
        "analyze",
        "--problem",
        &bundled("reciprocal.toml"),
        "--grid",
        "20",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.starts_with("t,lambda_0"), "got header: {:.60}", text);
    // Header plus one row per grid point.
    assert_eq!(text.lines().count(), 21);
}

#[test]
fn analyze_report_format_succeeds() {
    let out = run(&[
        "analyze",
        "--problem",
        &bundled("reciprocal.toml"),
        "--grid",
        "5",
        "--format",
        "report",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!stdout_of(&out).is_empty());
}

#[test]
fn scan_is_deterministic_across_runs() {
    let args = [
        "scan",
        "--problem",
        &bundled("reciprocal.toml"),
        "--grid",
        "200",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(
        first.stdout, second.stdout,
        "scan output must be byte-identical between runs"
    );
    assert!(stdout_of(&first).contains("B_MAX"));
}

#[test]
fn scan_accepts_ascii_criterion_aliases() {
    let out = run(&[
        "scan",
        "--problem",
        &bundled("reciprocal.toml"),
        "--grid",
        "100",
        "--criteria",
        "B_MAX_UP,B_MIN_UP",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    assert!(stdout_of(&out).contains("B_MAX"));
}

#[test]
fn verify_passes_on_a_bundled_problem() {
    let out = run(&[
        "verify",
        "--problem",
        &bundled("proportional.toml"),
        "--grid",
        "25",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
}

#[test]
fn trace_report_lists_witness_quantities() {
    let out = run(&[
        "trace",
        "--problem",
        &bundled("two_site_walk.toml"),
        "--grid",
        "3",
        "--format",
        "report",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    assert!(!stdout_of(&out).is_empty());
}

#[test]
fn out_flag_writes_the_same_bytes_as_stdout() {
    let path: PathBuf =
        std::env::temp_dir().join(format!("bd-spectra-cli-test-{}.csv", std::process::id()));
    let piped = run(&[
        "analyze",
        "--problem",
        &bundled("reciprocal.toml"),
        "--grid",
        "10",
    ]);
    let to_file = run(&[
        "analyze",
        "--problem",
        &bundled("reciprocal.toml"),
        "--grid",
        "10",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(to_file.status.code(), Some(0));
    let written = std::fs::read(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(written, piped.stdout);
}

#[test]
fn unknown_criterion_is_an_input_error() {
    let out = run(&[
        "scan",
        "--problem",
        &bundled("reciprocal.toml"),
        "--criteria",
        "NOT_A_TAG",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("valid tags"));
}

#[test]
fn criterion_for_the_wrong_model_kind_is_an_input_error() {
    let out = run(&[
        "scan",
        "--problem",
        &bundled("reciprocal.toml"),
        "--criteria",
        "D_MAX_UP",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("not defined for"));
}

#[test]
fn malformed_expression_reports_offset_and_exits_2() {
    let out = run(&["analyze", "--problem", &fixture("bad_syntax.toml")]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out);
    assert!(err.contains("syntax error at offset"), "stderr: {err}");
}

#[test]
fn out_of_range_probability_exits_3() {
    let out = run(&["analyze", "--problem", &fixture("bad_range.toml")]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_of(&out).contains("range violation"));
}

#[test]
fn missing_problem_file_exits_2() {
    let out = run(&["analyze", "--problem", "/nonexistent/nowhere.toml"]);
    assert_eq!(out.status.code(), Some(2));
}
