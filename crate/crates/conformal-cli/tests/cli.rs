//! End-to-end tests of the `conformal` binary: exit-code classes,
//! report shapes, JSON determinism, and file loading.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_conformal"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

fn payload(out: &Output) -> serde_json::Value {
    let v: serde_json::Value = serde_json::from_str(&stdout(out)).expect("stdout is JSON");
    assert_eq!(v["schema_version"], 1);
    assert!(v["engine"].as_str().unwrap().starts_with("conformal-cli "));
    assert!(v["command"].as_str().unwrap().starts_with("conformal "));
    v["payload"].clone()
}

fn repo_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn temp_file(name: &str, content: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("conformal-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let path = dir.join(name);
    std::fs::write(&path, content).expect("temp file");
    path
}

// ---------------------------------------------------------------------------
// Exit code 0: successful queries
// ---------------------------------------------------------------------------

#[test]
fn ext_free_free_gap_two_has_dimension_two() {
    let out = run(&[
        "ext", "--algebra", "builtin:R", "--sub", "V(0,-1)", "--quot", "V(0,1)", "--json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let p = payload(&out);
    assert_eq!(p["ext_dim"], 2);
    assert_eq!(p["frame"], "direct");
    assert_eq!(p["representatives"].as_array().unwrap().len(), 2);
}

#[test]
fn json_reports_are_byte_identical_across_runs() {
    let args = [
        "ext", "--algebra", "builtin:R", "--sub", "V(0,-1)", "--quot", "V(0,1)", "--json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn special_sweep_finds_the_quadratic_weights() {
    let out = run(&[
        "special", "--algebra", "builtin:R", "--delta-diff", "6", "--max-degree", "9", "--json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let p = payload(&out);
    assert_eq!(p["generic_ext_dim"], 0);
    let values: Vec<&str> = p["special"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["value"].as_str().unwrap())
        .collect();
    assert_eq!(values, ["-5/2-1/2*sqrt(19)", "-5/2+1/2*sqrt(19)"]);
}

#[test]
fn ann_solvable_reaches_zero() {
    let out = run(&["ann", "solvable", "--N", "5"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("solvable: yes"), "{text}");

    let out = run(&["ann", "solvable", "--N", "3", "--json"]);
    let p = payload(&out);
    assert_eq!(p["algebra"], "R");
    assert_eq!(p["dim"], 6);
    assert_eq!(p["solvable"], true);
    let dims = p["derived_series"].as_array().unwrap();
    assert_eq!(dims.first().unwrap(), 6);
    assert_eq!(dims.last().unwrap(), 0);
}

#[test]
fn ann_jacobi_verifies_symbolically() {
    let out = run(&["ann", "jacobi", "--json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(payload(&out)["ok"], true);
}

#[test]
fn bundled_algebra_files_load_and_pass() {
    for rel in ["specs/r.json", "specs/virasoro.json"] {
        let path = repo_path(rel);
        let out = run(&["algebra", "check", "--algebra", path.to_str().unwrap(), "--json"]);
        assert!(out.status.success(), "{rel}: {}", stderr(&out));
        assert_eq!(payload(&out)["ok"], true, "{rel}");
    }
}

#[test]
fn bundled_algebra_file_matches_the_builtin() {
    let path = repo_path("specs/r.json");
    let out = run(&[
        "ext", "--algebra", path.to_str().unwrap(), "--sub", "C(0)", "--quot", "V(0,1)",
        "--json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let p = payload(&out);
    assert_eq!(p["ext_dim"], 1);
    assert_eq!(p["representatives"][0]["actions"]["L"], "l^2");
}

#[test]
fn novikov_build_prints_the_conformal_table() {
    let out = run(&["novikov", "build", "--json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let p = payload(&out);
    assert_eq!(p["identities_ok"], true);
    let conf = &p["conformal"];
    assert_eq!(conf["axioms_ok"], true);
    assert_eq!(conf["brackets"]["e1,e2"]["e1"], "l");
    assert_eq!(conf["brackets"]["e2,e1"]["e1"], "d + l");
    assert_eq!(conf["brackets"]["e2,e2"]["e1"], "d + 2*l");
    assert_eq!(conf["brackets"]["e2,e2"]["e2"], "d + 2*l");

    let path = repo_path("specs/novikov.json");
    let from_file = run(&["novikov", "build", "--novikov", path.to_str().unwrap(), "--json"]);
    assert!(from_file.status.success());
    assert_eq!(payload(&from_file)["conformal"]["brackets"], *conf.get("brackets").unwrap());
}

#[test]
fn module_check_accepts_standard_and_file_modules() {
    let out = run(&["module", "check", "--algebra", "builtin:R", "--module", "V(0,1)"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("module axioms hold"));

    let file = temp_file("good-module.json", r#"{ "free_actions": ["d + 3*l", "0"] }"#);
    let out = run(&["module", "check", "--algebra", "builtin:R", "--module", file.to_str().unwrap(), "--json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(payload(&out)["ok"], true);
}

#[test]
fn rank1_solve_reports_the_two_parameter_family() {
    let out = run(&["rank1", "solve", "--algebra", "builtin:R", "--max-degree", "3", "--json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let p = payload(&out);
    assert_eq!(p["includes_zero_module"], true);
    let families = p["families"].as_array().unwrap();
    assert_eq!(families.len(), 1);
    assert_eq!(families[0]["params"], serde_json::json!(["alpha", "Delta"]));
    assert_eq!(families[0]["actions"]["L"], "l*Delta + d + alpha");
    assert_eq!(families[0]["actions"]["I"], "0");
}

#[test]
fn ext_query_file_drives_a_type_one_solve() {
    let query = temp_file(
        "type1.json",
        r#"{
            "algebra": "builtin:R",
            "type": 1,
            "params": { "gamma": "0", "alpha": "0", "delta": "1" },
            "max_degree": 10
        }"#,
    );
    let out = run(&["ext", "--query", query.to_str().unwrap(), "--json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let p = payload(&out);
    assert_eq!(p["ext_dim"], 1);
    assert_eq!(p["max_degree"], 10);
    assert_eq!(p["sub"], "C(0)");
    assert_eq!(p["quot"], "V(0,1)");
    assert_eq!(p["representatives"][0]["actions"]["L"], "l^2");
}

// ---------------------------------------------------------------------------
// Exit code 1: verification failures
// ---------------------------------------------------------------------------

/// The rank-two table with one bracket coefficient perturbed: skew fails.
const BROKEN_ALGEBRA: &str = r#"{
  "name": "Rbroken",
  "generators": ["L", "I"],
  "brackets": {
    "L,L": { "L": "d + 2*l", "I": "d + 2*l" },
    "L,I": { "I": "d + l" },
    "I,L": { "I": "2*l" }
  }
}"#;

#[test]
fn perturbed_algebra_fails_check_with_witness() {
    let file = temp_file("broken-algebra.json", BROKEN_ALGEBRA);
    let out = run(&["algebra", "check", "--algebra", file.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let p = payload(&out);
    assert_eq!(p["ok"], false);
    assert!(!p["skew_failures"].as_array().unwrap().is_empty());
}

#[test]
fn load_gate_rejects_perturbed_algebra_unless_disabled() {
    let file = temp_file("broken-algebra-2.json", BROKEN_ALGEBRA);
    let out = run(&[
        "ext", "--algebra", file.to_str().unwrap(), "--sub", "C(0)", "--quot", "C(0)", "--json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let p = payload(&out);
    assert_eq!(p["ok"], false);
    assert!(p["detail"].as_str().unwrap().contains("axioms"));

    // Same query with the gate disabled: both modules are one-dimensional
    // at the same evaluation point, so the solve itself succeeds.
    let out = run(&[
        "ext", "--algebra", file.to_str().unwrap(), "--sub", "C(0)", "--quot", "C(0)",
        "--no-verify", "--json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(payload(&out)["ext_dim"], 1);
}

#[test]
fn incompatible_module_actions_fail_check() {
    let file = temp_file("bad-module.json", r#"{ "free_actions": ["d", "d"] }"#);
    let out = run(&["module", "check", "--algebra", "builtin:R", "--module", file.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let p = payload(&out);
    assert_eq!(p["ok"], false);
    assert!(!p["failures"].as_array().unwrap().is_empty());
}

// ---------------------------------------------------------------------------
// Exit code 2: malformed input
// ---------------------------------------------------------------------------

#[test]
fn schema_violations_exit_two() {
    // Missing file.
    let out = run(&["algebra", "check", "--algebra", "/nonexistent/nowhere.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cannot read"));

    // Unknown JSON field.
    let file = temp_file("unknown-field.json", r#"{ "name": "X", "generators": ["L"], "extra": 1 }"#);
    let out = run(&["algebra", "check", "--algebra", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // Expression syntax error inside a file, with a byte offset.
    let file = temp_file(
        "bad-expr.json",
        r#"{ "name": "X", "generators": ["L"], "brackets": { "L,L": { "L": "d + + l" } } }"#,
    );
    let out = run(&["algebra", "check", "--algebra", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("at byte"));

    // Unknown variable in a bracket entry.
    let file = temp_file(
        "bad-var.json",
        r#"{ "name": "X", "generators": ["L"], "brackets": { "L,L": { "L": "d + m" } } }"#,
    );
    let out = run(&["algebra", "check", "--algebra", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // Malformed module string.
    let out = run(&["module", "check", "--algebra", "builtin:R", "--module", "V(0)"]);
    assert_eq!(out.status.code(), Some(2));

    // --sub/--quot and --query are mutually exclusive.
    let query = temp_file("q.json", r#"{ "type": 3, "params": { "alpha_sub": "0", "delta_sub": "0", "alpha_quot": "0", "delta_quot": "0" } }"#);
    let out = run(&[
        "ext", "--algebra", "builtin:R", "--sub", "V(0,0)", "--quot", "V(0,0)",
        "--query", query.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Wrong parameter set for the query type.
    let query = temp_file("bad-q.json", r#"{ "type": 1, "params": { "alpha_sub": "0" } }"#);
    let out = run(&["ext", "--algebra", "builtin:R", "--query", query.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // Truncation order zero.
    let out = run(&["ann", "solvable", "--N", "0"]);
    assert_eq!(out.status.code(), Some(2));

    // clap usage errors share the exit code.
    let out = run(&["ext", "--algebra", "builtin:R", "--sub", "V(0,0)", "--quot", "V(0,0)", "--json", "--text"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

// ---------------------------------------------------------------------------
// Exit code 3: well-formed but unsupported
// ---------------------------------------------------------------------------

/// A valid rank-two table (two commuting copies of the rank-one algebra)
/// that is not one of the built-in tables.
const SUM_ALGEBRA: &str = r#"{
  "name": "VirPlusVir",
  "generators": ["A", "B"],
  "brackets": {
    "A,A": { "A": "d + 2*l" },
    "B,B": { "B": "d + 2*l" }
  }
}"#;

#[test]
fn unsupported_queries_exit_three() {
    let file = temp_file("sum-algebra.json", SUM_ALGEBRA);
    let path = file.to_str().unwrap();

    // The table passes its axioms...
    let out = run(&["algebra", "check", "--algebra", path, "--json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(payload(&out)["ok"], true);

    // ...but the classification and the standard modules are only
    // implemented for the built-in tables.
    let out = run(&["rank1", "solve", "--algebra", path, "--max-degree", "2"]);
    assert_eq!(out.status.code(), Some(3));

    let out = run(&["ext", "--algebra", path, "--sub", "V(0,0)", "--quot", "V(0,1)"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn help_and_version_exit_zero() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    let out = run(&["--version"]);
    assert!(out.status.success());
}
