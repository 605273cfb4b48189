//! End-to-end tests of the `minkprop` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const GAUSSIAN: &str = r#"{"dim":4,"terms":[{"re":1.0,"im":0.0,"alpha":[0,0,0,0]}],"center":[0,0,0,0],"widths":[1,1,1,1],"phase":[0,0,0,0]}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_minkprop"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn gaussian_file(dir: &Path) -> PathBuf {
    let p = dir.join("u.json");
    std::fs::write(&p, GAUSSIAN).unwrap();
    p
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

#[test]
fn pair_shell_density() {
    let dir = tempfile::tempdir().unwrap();
    let u = gaussian_file(dir.path());
    let v = json(&run(&["pair", "--dist", "eps+", "--mass", "1", "--testfn", u.to_str().unwrap()]));
    assert_eq!(v["schema"], "minkprop/1");
    assert_eq!(v["dist"], "eps+");
    // ⟨ε⁺₁, e^{−p²/2}⟩.
    assert!((v["re"].as_f64().unwrap() - 0.183_005_512_193_908_76).abs() < 1e-9);
    assert_eq!(v["converged"], true);
}

#[test]
fn pair_propagators_and_light_cone_forms() {
    let dir = tempfile::tempdir().unwrap();
    let u = gaussian_file(dir.path());
    let u = u.to_str().unwrap();
    let v = json(&run(&["pair", "--dist", "Dret@pos", "--testfn", u]));
    assert!((v["im"].as_f64().unwrap() + 0.5).abs() < 1e-9);
    let w = json(&run(&["pair", "--dist", "Dret", "--mass", "0", "--testfn", u]));
    assert!((w["im"].as_f64().unwrap() + 0.5).abs() < 1e-7);
    let out = run(&["pair", "--dist", "Dret@pos", "--mass", "1", "--testfn", u]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pair_dirac_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let u = gaussian_file(dir.path());
    let v = json(&run(&["pair", "--dist", "slash:Dplus", "--mass", "1", "--testfn", u.to_str().unwrap()]));
    let m = v["matrix"].as_array().unwrap();
    assert_eq!(m.len(), 4);
    assert!(m.iter().all(|row| row.as_array().unwrap().len() == 4));
}

#[test]
fn invalid_input_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let u = gaussian_file(dir.path());
    let u = u.to_str().unwrap();
    assert_eq!(run(&["pair", "--dist", "bogus", "--testfn", u]).status.code(), Some(2));
    assert_eq!(run(&["pair", "--dist", "eps+", "--mass", "-1", "--testfn", u]).status.code(), Some(2));
    assert_eq!(run(&["pair", "--dist", "eps+", "--testfn", "/nonexistent.json"]).status.code(), Some(2));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dim":4,"terms":[],"center":[0],"widths":[1],"phase":[0]}"#).unwrap();
    assert_eq!(run(&["pair", "--dist", "eps+", "--testfn", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "ft_table", "--count", "0"]).status.code(), Some(2));
    assert_eq!(run(&["fock", "ccr", "--stats", "anyon"]).status.code(), Some(2));
}

#[test]
fn verify_is_deterministic_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let out = run(&["verify", "--suite", "ft_table", "--count", "2", "--seed", "3", "--out", p.to_str().unwrap()]);
        assert!(out.status.success());
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let v: Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["seed"], 3);
    let lines = v["suites"][0]["lines"].as_array().unwrap();
    assert!(!lines.is_empty());
}

#[test]
fn verify_tolerance_override_can_fail_a_suite() {
    let out = run(&["verify", "--suite", "ft_table", "--count", "1", "--tol", "0"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], false);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn table_csv() {
    let out = run(&["table", "--dist", "D", "--mass", "1", "--grid", "t=-1:1:3,r=0:1:2"]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(rdr.headers().unwrap(), vec!["t", "r", "re", "im", "abs_err"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6);
    let im = |i: usize| rows[i][3].parse::<f64>().unwrap();
    assert!((im(0) + im(4)).abs() < 1e-9, "D is odd in t");
    assert_eq!(run(&["table", "--dist", "D", "--grid", "t=0:1"]).status.code(), Some(2));
}

#[test]
fn fock_commands() {
    let v = json(&run(&["fock", "ccr", "--dp", "0.5", "--nhalf", "1", "--stats", "fermion"]));
    assert_eq!(v["pass"], true);
    let v = json(&run(&["fock", "bridge", "--ladder", "0.8,0.4"]));
    assert_eq!(v["pass"], true);
    assert_eq!(v["x"], serde_json::json!([1.0, 0.0, 0.0, 0.0]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    // Coincident points: the smeared propagator vanishes and the deviation is absolute.
    let v = json(&run(&["fock", "bridge", "--x", "0.5,0,0,0", "--y", "0.5,0,0,0", "--ladder", "0.8"]));
    assert_eq!(v["pass"], true);
    assert_eq!(v["scale"], 1.0);
}
