use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_carpetdim"));
    c.env_remove("CARPETDIM_NODE_BUDGET");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn fixtures(dir: &Path) -> PathBuf {
    let out = run(&["fixtures", "--output-dir", dir.to_str().unwrap()]);
    assert!(out.status.success());
    dir.to_path_buf()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const COLUMNS_2_1: &str =
    r#"{ "schema": 1, "l": 3, "m": 2, "digits": [[0,0],[1,1],[2,0]], "transitions": "full" }"#;

#[test]
fn dimension_contains_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "c.json", COLUMNS_2_1);
    let csv = dir.path().join("s.csv");
    let v = json(&run(&["dimension", "--spec", &spec, "--depth", "20", "--csv", csv.to_str().unwrap()]));
    let d = &v["dimension"];
    let closed = d["closed_form"].as_f64().unwrap();
    assert!((closed - 1.349684).abs() < 1e-6);
    assert!(d["lower"].as_f64().unwrap() <= closed && closed <= d["upper"].as_f64().unwrap());
    for key in ["M", "K", "K_prime", "K_tilde"] {
        assert!(v["constants"][key].is_number());
    }
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().next(), Some("n,log_Sn,words,upper_bound,lower_bound"));
    assert_eq!(text.lines().count(), 21);
}

#[test]
fn parity_count_and_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let fx = fixtures(dir.path());
    let spec = fx.join("clump_not_additive.json");
    let v = json(&run(&["counts", "--spec", spec.to_str().unwrap(), "--word", "1,2,2,2,2,1", "--brute-force"]));
    assert_eq!(v["count"], "3");
    assert_eq!(v["agree"], true);
}

#[test]
fn additivity_refutation_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let fx = fixtures(dir.path());
    let spec = fx.join("clump_not_additive.json");
    let v = json(&run(&["additivity", "--spec", spec.to_str().unwrap(), "--max-len", "12"]));
    assert_eq!(v["additivity"]["verdict"], "refuted-up-to-12");
    assert!(v["additivity"]["witness"]["ratio"].as_f64().unwrap() < 0.01);
    assert_eq!(v["uniqueness"]["singleton_clump"], true);
}

#[test]
fn analyze_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let fx = fixtures(dir.path());
    let spec = fx.join("no_clump_additive.json");
    let args = ["analyze", "--spec", spec.to_str().unwrap(), "--theta", "0.5", "--depth", "14"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["diagnostics"]["gibbs"]["contained"], true);
    assert_eq!(v["diagnostics"]["uniqueness"]["verdict"], "conditional-on-almost-additivity");
    assert!(v["pressure"]["lower"].as_f64().unwrap() <= v["pressure"]["upper"].as_f64().unwrap());
}

#[test]
fn compensation_at_golden_point() {
    let dir = tempfile::tempdir().unwrap();
    let fx = fixtures(dir.path());
    let spec = fx.join("no_clump_additive.json");
    let v = json(&run(&["compensation", "--spec", spec.to_str().unwrap(), "--period", "2"]));
    let golden = ((1.0 + 5f64.sqrt()) / 2.0).ln();
    assert!((v["spectral"].as_f64().unwrap() - golden).abs() < 1e-10);
}

#[test]
fn render_writes_pbm() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "c.json", COLUMNS_2_1);
    let out = dir.path().join("c.pbm");
    let v = json(&run(&["render", "--spec", &spec, "--k", "2", "--scale", "3", "--output", out.to_str().unwrap()]));
    assert_eq!(v["filled"], 9);
    let bytes = std::fs::read(out).unwrap();
    assert!(bytes.starts_with(b"P4\n27 12\n"));
    assert_eq!(bytes.len(), b"P4\n27 12\n".len() + 4 * 12);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let fx = fixtures(dir.path());
    let eshin = fx.join("clump_not_additive.json");
    let eshin = eshin.to_str().unwrap();

    let bad = write(dir.path(), "bad.json", r#"{ "schema": 1 }"#);
    assert_eq!(run(&["counts", "--spec", &bad, "--word", "1"]).status.code(), Some(1));
    assert_eq!(run(&["counts", "--spec", "/nonexistent/x.json", "--word", "1"]).status.code(), Some(1));

    // 1^inf has no lift
    assert_eq!(run(&["compensation", "--spec", eshin, "--period", "1"]).status.code(), Some(2));
    let cycle = write(
        dir.path(),
        "cycle.json",
        r#"{ "schema": 1, "l": 3, "m": 2, "digits": [[0,0],[1,1]], "transitions": [[[0,0],[1,1]], [[1,1],[0,0]]] }"#,
    );
    assert_eq!(run(&["gibbs", "--spec", &cycle]).status.code(), Some(2));

    let out = run(&["pressure", "--spec", eshin, "--theta", "0.5", "--depth", "30", "--mode", "exact", "--node-budget", "1000"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1000"));
    let out = bin()
        .args(["pressure", "--spec", eshin, "--theta", "0.5", "--depth", "30", "--mode", "exact"])
        .env("CARPETDIM_NODE_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    assert_eq!(run(&["analyze", "--spec", eshin]).status.code(), Some(64));
    assert_eq!(run(&["dimension", "--spec", eshin, "--theta", "0.5", "--l", "3", "--m", "2"]).status.code(), Some(64));
    assert_eq!(run(&["dimension", "--spec", eshin, "--depth", "0", "--theta", "0.5"]).status.code(), Some(64));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
