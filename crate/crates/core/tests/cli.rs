use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_schwarzpick"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const IDENTITY: &str = r#"{"kind":"poly","n":1,"m":1,"terms":[{"alpha":[1],"coef":[[1,0]]}]}"#;
const COUNTEREXAMPLE: &str = r#"{"kind":"poly","n":1,"m":2,"terms":[
    {"alpha":[0],"coef":[[0,0],[0.7071067811865476,0]]},
    {"alpha":[1],"coef":[[0.7071067811865476,0],[0,0]]}]}"#;

#[test]
fn grad_of_identity() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "id.json", IDENTITY);
    let out = run(&["grad", "--map", &map, "--point", "0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["value"], 1.0);
    assert_eq!(v["branch"], "zero");
}

#[test]
fn bound_on_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "ce.json", COUNTEREXAMPLE);
    let out = run(&["bound", "--map", &map, "--point", "0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["lhs"], 0.0);
    assert!((v["rhs"].as_f64().unwrap() - 0.5).abs() < 1e-15);
    assert_eq!(v["holds"], true);
    let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
    assert_eq!(keys.len(), 6);
}

#[test]
fn map_from_stdin() {
    use std::io::Write;
    let mut child = bin()
        .args(["grad", "--map", "-", "--point", "0.25,0"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(IDENTITY.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["branch"], "nonzero");
}

#[test]
fn bound_violation_exits_one() {
    // 2z sends the ball outside itself, but |2 * 0.1| < 1 keeps the point evaluable
    let dir = tempfile::tempdir().unwrap();
    let map = write(
        dir.path(),
        "double.json",
        r#"{"kind":"poly","n":1,"m":1,"terms":[{"alpha":[1],"coef":[[2,0]]}]}"#,
    );
    let out = run(&["bound", "--map", &map, "--point", "0.1,0"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["holds"], false);
}

#[test]
fn invalid_json_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [
        ("broken.json", "{\"kind\":"),
        ("kind.json", r#"{"kind":"nope"}"#),
        (
            "coef.json",
            r#"{"kind":"poly","n":1,"m":1,"terms":[{"alpha":[1],"coef":[[1,"x"]]}]}"#,
        ),
    ] {
        let map = write(dir.path(), name, body);
        for sub in ["grad", "bound"] {
            let out = run(&[sub, "--map", &map, "--point", "0,0"]);
            assert_eq!(out.status.code(), Some(2), "{name} {sub}");
            let err = String::from_utf8_lossy(&out.stderr);
            assert!(err.contains("--map"), "{err}");
        }
    }
    let map = write(
        dir.path(),
        "c.json",
        r#"{"kind":"poly","n":1,"m":1,"terms":[{"alpha":[1],"coef":[[1,"x"]]}]}"#,
    );
    let out = run(&["grad", "--map", &map, "--point", "0,0"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("/terms/0/coef/0/1"));
    let out = run(&["grad", "--map", "/nonexistent/file.json", "--point", "0,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_point_names_flag() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "id.json", IDENTITY);
    let out = run(&["grad", "--map", &map, "--point", "0;1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--point"));
    let out = run(&["grad", "--map", &map, "--point", "0,0;0,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn slice_example() {
    let out = run(&["slice", "--p", "0.5,0;0,0", "--q", "0,0;0.5,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["c"], serde_json::json!([0.5, 0.0]));
    assert!((v["r"].as_f64().unwrap() - 7f64.sqrt() / 2.0).abs() < 1e-15);
}

#[test]
fn extremal_then_bound_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    let out = run(&[
        "extremal",
        "--case",
        "nonzero",
        "--p",
        "0.3,0;0,0",
        "--u",
        "1,0;0,0",
        "--a",
        "0,0.5;0.2,0",
        "--theta",
        "1.0471975511965976",
        "--out",
        w.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = run(&[
        "bound",
        "--map",
        w.to_str().unwrap(),
        "--point",
        "0.3,0;0,0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["slack"].as_f64().unwrap().abs() <= 1e-12);

    let out = run(&[
        "diagnose",
        "--map",
        w.to_str().unwrap(),
        "--p",
        "0.3,0;0,0",
        "--q",
        "0.6,0;0,0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["matches"], true);
    assert!((v["fitted_theta"].as_f64().unwrap() - std::f64::consts::FRAC_PI_3).abs() < 1e-10);
}

#[test]
fn extremal_zero_to_stdout() {
    let out = run(&[
        "extremal", "--case", "zero", "--p", "0,0", "--u", "1,0", "--beta", "0,1;0,0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["kind"], "pipeline");
    let out = run(&["extremal", "--case", "zero", "--p", "0,0", "--u", "1,0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "extremal", "--case", "nonzero", "--p", "0,0", "--u", "1,0", "--beta", "1,0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // u not collinear with p
    let out = run(&[
        "extremal",
        "--case",
        "zero",
        "--p",
        "0.5,0;0,0",
        "--u",
        "0,0;1,0",
        "--beta",
        "1,0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn diagnose_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    // z^2 misses equality at 0.5: precondition failure
    let sq = write(
        dir.path(),
        "sq.json",
        r#"{"kind":"poly","n":1,"m":1,"terms":[{"alpha":[2],"coef":[[1,0]]}]}"#,
    );
    let out = run(&["diagnose", "--map", &sq, "--p", "0.5,0", "--q", "0.7,0"]);
    assert_eq!(out.status.code(), Some(2));
    // -z + 1e-3 z^3 has equality at 0 but is not a disk automorphism
    let f = write(
        dir.path(),
        "f.json",
        r#"{"kind":"poly","n":1,"m":1,"terms":[{"alpha":[1],"coef":[[-1,0]]},{"alpha":[3],"coef":[[0.001,0]]}]}"#,
    );
    let out = run(&[
        "diagnose",
        "--map",
        &f,
        "--p",
        "0,0",
        "--q",
        "0.5,0",
        "--samples",
        "16",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["matches"], false);
    assert_eq!(v["points_tested"], 16);
}

#[test]
fn fuzz_writes_log_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.jsonl");
    let out = run(&[
        "fuzz",
        "--trials",
        "3",
        "--points-per-trial",
        "4",
        "--n",
        "2",
        "--m",
        "3",
        "--seed",
        "9",
        "--out",
        log.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["trials_run"], 3);
    assert_eq!(v["points_checked"], 12);
    assert_eq!(v["violations"], serde_json::json!([]));
    assert!(v["pinned"]["classical_excess"].as_f64().unwrap() > 0.2);
    let text = fs::read_to_string(&log).unwrap();
    assert_eq!(text.lines().count(), 13);

    let out = run(&["fuzz", "--trials", "0", "--no-pin"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["worst_slack"].is_null());

    let out = run(&["fuzz", "--margin", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["fuzz", "--fd-steps", "1e-5,1e-4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["slice", "--p", "0,0"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
