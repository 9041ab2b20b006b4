//! End-to-end tests of the command line driver: exit codes, report
//! shapes, determinism, and the checked-in example configs.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_toric-endo"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn example(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name)
        .to_str()
        .unwrap()
        .to_string()
}

#[test]
fn walls_on_the_plane_report_unit_coefficients() {
    let out = run(&["walls", "--fan", "builtin:p2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.matches("a = [1]").count(), 3, "{text}");
}

#[test]
fn walls_json_carries_schema_and_relations() {
    let out = run(&["walls", "--fan", "builtin:f2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema"], 1);
    let mut coeffs: Vec<i64> =
        v["walls"].as_array().unwrap().iter().map(|w| w["a"][0].as_i64().unwrap()).collect();
    coeffs.sort_unstable();
    assert_eq!(coeffs, vec![-2, 0, 0, 2]);
}

#[test]
fn certify_tangent_on_the_plane_exits_zero() {
    let out = run(&["certify", "--bundle", "tangent", "--degree", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("certified via wall"));
}

#[test]
fn certify_on_a_product_of_lines_is_a_negative_verdict() {
    let out = run(&[
        "certify", "--fan", "builtin:p1xp1", "--bundle", "tangent", "--degree", "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("no applicable wall"));
}

#[test]
fn certify_json_reports_are_byte_identical_across_runs() {
    let args = [
        "certify", "--fan", "builtin:f2", "--bundle", "cotangent", "--degree", "3", "--format",
        "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn chern_symbolic_residuals_vanish() {
    let out = run(&["chern", "verify", "--rank", "3", "--dim", "2", "--symbolic"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("all residuals vanish"));
}

#[test]
fn chern_numeric_mode_needs_distinct_degrees() {
    let out = run(&["chern", "verify", "--rank", "2", "--dim", "2", "--d", "3", "--q", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn frobenius_examples_match_the_lattice_analysis() {
    let out = run(&["frobenius-analyze", "--fan", "builtin:p1xp1", "--matrix", "2,0;0,3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("eigenfactors"));

    let out = run(&["frobenius-analyze", "--fan", "builtin:p1xp1", "--matrix", "0,2;2,0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("phi^2 = 4 * identity"));

    let out = run(&["frobenius-analyze", "--fan", "builtin:p1xp1", "--matrix", "1,1;0,1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("not toric"));
}

#[test]
fn hirzebruch_template_and_samples() {
    let out = run(&[
        "hirzebruch", "--n", "1", "--degree", "2", "--samples", "4", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["slot_dims"], serde_json::json!([1, 2, 3]));
    assert_eq!(v["parameter_sum"], 7);
    assert_eq!(v["samples"].as_array().unwrap().len(), 4);

    // same seed, same bytes; a different seed still verifies
    let again = run(&[
        "hirzebruch", "--n", "1", "--degree", "2", "--samples", "4", "--format", "json",
    ]);
    assert_eq!(out.stdout, again.stdout);
    let seeded = run(&["hirzebruch", "--n", "2", "--degree", "3", "--seed", "11"]);
    assert_eq!(seeded.status.code(), Some(0));
}

#[test]
fn p1n_classification_runs_both_ways() {
    let out = run(&["p1n-classify", "--degrees", "2,2,2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("A_l z_l^2"));

    let out = run(&["p1n-classify", "--degrees", "1,2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"], "no-based-map");
}

#[test]
fn frobenius_candidate_config_is_accepted() {
    let out = run(&[
        "classify-split", "--fan", "builtin:f1", "--spec", &example("f1_frobenius.json"),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("no common zero"));
    assert!(text.contains("verdict: based map"));
}

#[test]
fn triangular_family_config_is_accepted() {
    let out = run(&[
        "classify-split",
        "--fan",
        "builtin:p2",
        "--spec",
        &example("pp2_triangular.json"),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["zero_check"]["status"], "no-common-zero");
    assert_eq!(v["zero_check"]["method"], "triangular");
}

#[test]
fn compat_config_verifies() {
    let out = run(&["compat", "verify", "--data", &example("compat_tangent_p2.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("all compatibility equations hold"));
}

#[test]
fn fan_files_load_like_builtins() {
    let out = run(&["walls", "--fan", &example("p2_fan.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).matches("a = [1]").count(), 3);
}

#[test]
fn a_non_smooth_fan_is_a_verdict_not_an_input_error() {
    let dir = std::env::temp_dir();
    let path = dir.join(format!("bad_fan_{}.json", std::process::id()));
    std::fs::write(
        &path,
        r#"{"rank": 2, "rays": [[2, 1], [0, 1], [-2, -1], [0, -1]],
            "max_cones": [[0, 1], [1, 2], [2, 3], [3, 0]]}"#,
    )
    .unwrap();
    let out = run(&["fan", "check", "--fan", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("rejected"));
}

#[test]
fn input_errors_exit_two() {
    // unknown builtin
    let out = run(&["walls", "--fan", "builtin:p3"]);
    assert_eq!(out.status.code(), Some(2));
    // wrong divisor arity
    let out = run(&["sections", "--divisor", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
    // malformed matrix
    let out = run(&["frobenius-analyze", "--matrix", "1,2;3"]);
    assert_eq!(out.status.code(), Some(2));
    // missing candidate file
    let out = run(&["classify-split", "--spec", "/nonexistent/candidate.json"]);
    assert_eq!(out.status.code(), Some(2));
    // unknown flag is a usage error
    let out = run(&["walls", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let dir = std::env::temp_dir();
    let path = dir.join(format!("walls_report_{}.json", std::process::id()));
    let out = run(&[
        "walls", "--fan", "builtin:p2", "--format", "json", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let body = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["schema"], 1);
}

#[test]
fn sections_lists_lattice_points_on_request() {
    let out = run(&["sections", "--divisor", "1,1,1", "--points", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["dimension"], 10);
    assert_eq!(v["points"].as_array().unwrap().len(), 10);
}
