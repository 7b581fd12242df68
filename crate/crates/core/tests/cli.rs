//! End-to-end tests of the `hamgadget` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hamgadget::kitaev::{compile, CircuitJson, ClockEncoding};
use hamgadget::operators::json::HamiltonianJson;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hamgadget"));
    c.env_remove("HAMGADGET_JOBS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn fixture(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel).to_string_lossy().into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const IDENTITY_CIRCUIT: &str = r#"{"layout": [["W", 1]], "gates": [{"label": "ID", "targets": [0]}]}"#;
const BELL_CIRCUIT: &str = r#"{"layout": [["W", 1], ["A", 1]],
  "gates": [{"label": "H", "targets": [0]}, {"label": "CNOT", "targets": [0, 1]}, {"label": "T", "targets": [1]}]}"#;

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "nosuch"]).status.code(), Some(2));
    assert_eq!(run(&["decide", "/nonexistent/instance.json"]).status.code(), Some(2));
    assert_eq!(run(&["compile", "--delta", "abc", "x.json"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn malformed_json_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.json", "{\"layout\": ");
    let out = run(&["compile", &p]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn compile_identity_has_tagged_components() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "id.json", IDENTITY_CIRCUIT);
    let v = json(&run(&["compile", &p]));
    assert_eq!(v["steps"], 1);
    assert_eq!(v["layout"].as_array().unwrap().last().unwrap()[0], "C");
    let tags: Vec<&str> = v["terms"].as_array().unwrap().iter().filter_map(|t| t["tag"].as_str()).collect();
    assert!(tags.contains(&"H_in") && tags.contains(&"H_prop"), "{tags:?}");
    assert!(!tags.contains(&"H_out"));

    let v = json(&run(&["compile", "--hout", &p]));
    let tags: Vec<&str> = v["terms"].as_array().unwrap().iter().filter_map(|t| t["tag"].as_str()).collect();
    assert!(tags.contains(&"H_out"), "{tags:?}");
}

#[test]
fn output_penalty_needs_an_output_qubit() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "a.json", r#"{"layout": [["A", 1]], "gates": [{"label": "ID", "targets": [0]}]}"#);
    assert_eq!(run(&["compile", "--hout", &p]).status.code(), Some(2));
    assert_eq!(run(&["compile", &p]).status.code(), Some(0));
}

#[test]
fn compiled_hamiltonian_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bell.json", BELL_CIRCUIT);
    for enc in ["unary", "abstract"] {
        let v = json(&run(&["compile", "--encoding", enc, "--delta", "3.5", "--hout", &p]));
        let loaded: HamiltonianJson = serde_json::from_value(v).unwrap();
        let from_file = loaded.to_hamiltonian().unwrap().realize_dense().unwrap();

        let circuit: CircuitJson = serde_json::from_str(BELL_CIRCUIT).unwrap();
        let encoding = if enc == "unary" { ClockEncoding::Unary } else { ClockEncoding::Abstract };
        let direct = compile(&circuit.to_circuit().unwrap(), encoding, 3.5, true).unwrap();
        let direct = direct.hamiltonian.realize_dense().unwrap();
        assert_eq!(from_file.shape(), direct.shape());
        let diff = (&from_file - &direct).camax();
        assert!(diff <= 1e-12, "{enc}: max entry difference {diff:e}");
    }
}

fn decide(path: &str, extra: &[&str]) -> Value {
    let mut args = vec!["decide"];
    args.extend_from_slice(extra);
    args.push(path);
    json(&run(&args))
}

#[test]
fn decide_bundled_instances() {
    for (file, kind, verdict) in [
        ("instances/apxsim_yes.json", "apx-sim", "YES"),
        ("instances/apxsim_no.json", "apx-sim", "NO"),
        ("instances/spectralgap_yes.json", "spectral-gap", "YES"),
        ("instances/spectralgap_no.json", "spectral-gap", "NO"),
        ("instances/spectralgap_promise_violated.json", "spectral-gap", "PROMISE-VIOLATED"),
    ] {
        let v = decide(&fixture(file), &[]);
        assert_eq!(v["kind"], kind, "{file}");
        assert_eq!(v["verdict"], verdict, "{file}");
        let hashes = v["manifest"]["input_hashes"].as_object().unwrap();
        assert!(hashes.values().all(|h| h.as_str().unwrap().len() == 64));
    }
}

#[test]
fn built_correlation_instances_decide_by_machine() {
    let dir = tempfile::tempdir().unwrap();
    for (machine, verdict) in [("fixture:yes", "YES"), ("fixture:no", "NO")] {
        let path = dir.path().join(format!("{}.json", &machine[8..])).to_string_lossy().into_owned();
        let out = run(&["--out", &path, "build-apx2corr", machine, "--steps", "3"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
        let v = decide(&path, &["--samples", "2000"]);
        assert_eq!(v["kind"], "apx-2corr");
        assert_eq!(v["verdict"], verdict, "{machine}");
    }
}

#[test]
fn built_apxsim_instance_matches_bundled_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("i.json").to_string_lossy().into_owned();
    assert!(run(&["--out", &path, "build-apxsim", "fixture:no", "--steps", "3"]).status.success());
    assert_eq!(decide(&path, &[])["verdict"], "NO");
}

fn strip_volatile(mut v: Value) -> Value {
    if let Some(m) = v.get_mut("manifest").and_then(Value::as_object_mut) {
        m.remove("wall_time_ms");
        m.remove("jobs");
    }
    v
}

/// Runs with the thread count set through the environment so that the
/// recorded command line is identical.
fn run_with_jobs(jobs: &str, args: &[&str]) -> Output {
    bin().env("HAMGADGET_JOBS", jobs).args(args).output().expect("binary runs")
}

#[test]
fn reports_are_deterministic_across_thread_counts() {
    let a = run_with_jobs("1", &["verify", "corollary1"]);
    let b = run_with_jobs("4", &["verify", "corollary1"]);
    assert_eq!(strip_volatile(json(&a)), strip_volatile(json(&b)));

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("report.json");
    let mut texts = Vec::new();
    for jobs in ["1", "3"] {
        let out = run_with_jobs(jobs, &["--out", p.to_str().unwrap(), "verify", "lemma4"]);
        assert!(out.status.success());
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
        texts.push(serde_json::to_string_pretty(&strip_volatile(v)).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn verify_accepts_an_explicit_config_and_reports_failures() {
    let out = run(&["verify", "lemma5", &fixture("suites/lemma5_corrupted.json")]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], false);
    assert!(String::from_utf8_lossy(&out.stderr).lines().any(|l| l.starts_with("FAIL lemma5/")));
}

#[test]
fn build_queryham_from_fixture() {
    let v = json(&run(&["build-queryham", "fixture:adaptive:0.1", "--encoding", "unary"]));
    let h: HamiltonianJson = serde_json::from_value(v.clone()).unwrap();
    let h = h.to_hamiltonian().unwrap();
    let m = h.realize_dense().unwrap();
    assert!((&m - m.adjoint()).camax() <= 1e-12);
    assert!(v["manifest"]["input_hashes"].as_object().unwrap().contains_key("machine"));
}

#[test]
fn vote_reports_exact_advantage() {
    let v = json(&run(&["vote", "fixture:yes:0.1", "--p-amp", "40", "--trials", "10000"]));
    let delta = v["outcome"]["delta"]["value"].as_f64().expect("numeric Δ");
    assert!(v["outcome"]["delta"]["exact"].as_str().unwrap().contains('/'));
    assert!(delta > 0.0, "{v}");
}
