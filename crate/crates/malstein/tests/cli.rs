use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_malstein"));
    cmd.env_remove("MALSTEIN_MAX_OUTCOMES");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn float(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn error_kind(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    v["error"]["kind"].as_str().unwrap().to_string()
}

#[test]
fn mono_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let edges = write(dir.path(), "k3.txt", "0 1\n1 2\n0 2\n");
    let out = run(&["mono", "--edges", edges.to_str().unwrap(), "--colors", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["m"], 3);
    assert_eq!(float(&v["mean"]), 1.5);
    assert_eq!(float(&v["variance"]), 0.75);
    assert_eq!(v["reports"][0]["bound_name"], "mono_wasserstein");
    assert!((float(&v["reports"][0]["total"]) - 8.1062).abs() < 1e-3);
    assert_eq!(v["exact"]["generic_bounds"].as_array().unwrap().len(), 6);
    assert_eq!(v["exact"]["dominance_holds"], true);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"variance\": 7.5000000000000000e-1"));
}

#[test]
fn distances_point_mass() {
    let dir = tempfile::tempdir().unwrap();
    let law = write(dir.path(), "pointmass0.json", r#"{"atoms": [0], "probs": [1]}"#);
    let out = run(&["distances", "--law", law.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(float(&v["d_K"]), 0.5);
    assert!((float(&v["d_W"]) - 0.7978845608).abs() < 1e-10);
}

#[test]
fn verify_reports_every_family() {
    let out = run(&["verify", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["all_passed"], true);
    let families = v["families"].as_array().unwrap();
    assert!(families.len() >= 20);
    for f in families {
        assert_eq!(f["failed"], 0);
        assert!(f["passed"].as_u64().unwrap() > 0);
    }
}

#[test]
fn output_is_reproducible_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let edges = write(dir.path(), "c12.txt", &(0..12).map(|i| format!("{} {}\n", i, (i + 1) % 12)).collect::<String>());
    let path = edges.to_str().unwrap();
    let args = ["mono", "--edges", path, "--colors", "2", "--samples", "20000", "--seed", "9"];
    let a = bin().args(args).args(["--workers", "1"]).output().unwrap();
    let b = bin().args(args).args(["--workers", "8"]).output().unwrap();
    let c = bin().args(args).args(["--workers", "8"]).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(b.stdout, c.stdout);
    let v = json(&a);
    assert_eq!(v["monte_carlo"]["n_samples"], 20000);
    let gap = (float(&v["monte_carlo"]["d_K_estimate"]) - float(&v["exact"]["d_K"])).abs();
    assert!(gap <= float(&v["monte_carlo"]["dkw_radius"]));
}

#[test]
fn csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let edges = write(dir.path(), "k3.txt", "0 1\n1 2\n0 2\n");
    let out = run(&["mono", "--edges", edges.to_str().unwrap(), "--colors", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("label,value\n"));
    assert!(text.contains("\nm,3\n"));
    assert!(text.contains("\nreports.mono_wasserstein.terms.first,"));
    assert!(text.contains("\nexact.generic_bounds.co_wasserstein.terms.second_alt_third_moment (excluded),"));
}

#[test]
fn space_cap_from_flag_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let edges = write(dir.path(), "k3.txt", "0 1\n1 2\n0 2\n");
    let path = edges.to_str().unwrap();
    let out =
        bin().args(["mono", "--edges", path, "--colors", "2"]).env("MALSTEIN_MAX_OUTCOMES", "4").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["exact"].is_null());
    assert!(v["exact_skipped"].as_str().unwrap().contains("cap of 4"));
    let out = run(&["mono", "--edges", path, "--colors", "2", "--max-outcomes", "8"]);
    assert!(json(&out)["exact"].is_object());
}

#[test]
fn randsum_report() {
    let dir = tempfile::tempdir().unwrap();
    let coin = r#"{"values": [-1, 1], "probs": [0.5, 0.5]}"#;
    let spec = write(dir.path(), "rs.json", &format!(r#"{{"N": {{"values": [4], "probs": [1]}}, "X": {coin}}}"#));
    let out = run(&["randsum", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(float(&v["reports"][0]["total"]), 0.5);
    assert!(float(&v["exact"]["d_W"]) < 0.5);
    let spec = write(dir.path(), "trunc.json", &format!(r#"{{"N": {{"pmf": [0, 0.5, 0.3]}}, "X": {coin}}}"#));
    let v = json(&run(&["randsum", "--spec", spec.to_str().unwrap()]));
    assert!((float(&v["truncated_mass"]) - 0.2).abs() < 1e-12);
}

#[test]
fn dejong_report() {
    let dir = tempfile::tempdir().unwrap();
    let coin = r#"{"values": [-1, 1], "probs": [0.5, 0.5]}"#;
    let spec = write(dir.path(), "xy.json", &format!(r#"{{"coords": [{coin}, {coin}], "table": [1, -1, -1, 1]}}"#));
    let path = spec.to_str().unwrap();
    let out = run(&["dejong", "--spec", path, "--p", "2", "--kappa", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let expected = (0.7978845608028654 + 4.0 / 3.0) * 2f64.sqrt()
        + 3f64.sqrt() * (0.7978845608028654 + 2.0 * 2f64.sqrt() / 3f64.sqrt());
    assert!((float(&v["reports"][0]["total"]) - expected).abs() < 1e-12);
    let out = run(&["dejong", "--spec", path, "--p", "1", "--kappa", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "NotDegenerate");
    let out = run(&["dejong", "--spec", path, "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "UsageError");
}

#[test]
fn input_errors_exit_two_with_json() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "loop.txt", "0 1\n2 2\n");
    let out = run(&["mono", "--edges", bad.to_str().unwrap(), "--colors", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "SelfLoop");
    assert!(out.stdout.is_empty());

    let out = run(&["mono", "--edges", "/nonexistent/graph.txt", "--colors", "2"]);
    assert_eq!((out.status.code(), error_kind(&out).as_str()), (Some(2), "IoError"));

    let k3 = write(dir.path(), "k3.txt", "0 1\n1 2\n0 2\n");
    let out = run(&["mono", "--edges", k3.to_str().unwrap(), "--colors", "1"]);
    assert_eq!((out.status.code(), error_kind(&out).as_str()), (Some(2), "BadColors"));

    let law = write(dir.path(), "bad.json", r#"{"atoms": [0, 1], "probs": [0.5]}"#);
    let out = run(&["distances", "--law", law.to_str().unwrap()]);
    assert_eq!((out.status.code(), error_kind(&out).as_str()), (Some(2), "LengthMismatch"));

    let out = run(&["frobnicate"]);
    assert_eq!((out.status.code(), error_kind(&out).as_str()), (Some(2), "UsageError"));

    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}
