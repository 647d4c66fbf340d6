//! End-to-end runs of the `cran` binary.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

const GOLDEN_COR4: &str = include_str!("golden/cor4_projection.txt");

fn cran(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cran")).args(args).env_remove("CRAN_THREADS").output().unwrap()
}

fn cran_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cran"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn one_bs_derivation_reproduces_the_golden_projection() {
    let sub = cran(&["region", "GDS-T1", "--substitute", "cor4"]);
    assert_eq!(sub.status.code(), Some(0), "{}", stderr(&sub));
    let text = stdout(&sub);
    let hint = text.lines().next().unwrap().strip_prefix("# eliminate: ").unwrap().to_string();
    assert_eq!(hint, "Ru1,Rv1");
    let projected = cran_stdin(&["fme", "-", "--eliminate", &hint], &text);
    assert_eq!(projected.status.code(), Some(0), "{}", stderr(&projected));
    assert_eq!(stdout(&projected), GOLDEN_COR4);
    // The one-step route agrees with the two-step one.
    assert_eq!(stdout(&cran(&["region", "GDS-T1", "--project", "cor4"])), GOLDEN_COR4);
}

#[test]
fn keep_is_the_complement_of_eliminate() {
    let text = stdout(&cran(&["region", "GDS-T1", "--substitute", "cor4"]));
    let kept = cran_stdin(&["fme", "-", "--keep", "R1,R2"], &text);
    assert_eq!(stdout(&kept), GOLDEN_COR4);
}

#[test]
fn printing_and_parsing_round_trip() {
    for id in ["GDS-T1", "GDS-III", "COR5", "GCOMP-T2", "DDF-P1"] {
        let text = stdout(&cran(&["region", id]));
        let again = cran_stdin(&["fme", "-"], &text);
        assert_eq!(again.status.code(), Some(0), "{id}: {}", stderr(&again));
        assert_eq!(stdout(&again), text, "{id}");
    }
}

#[test]
fn malformed_term_reports_its_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(&path, "vars: x y\nx + 2*y <= 3 + C1\nx - y <= 2 $ 1\n").unwrap();
    let o = cran(&["fme", path.to_str().unwrap(), "--eliminate", "y"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.txt:3:12:"), "{}", stderr(&o));
}

#[test]
fn unknown_variables_and_regions_are_usage_errors() {
    let text = stdout(&cran(&["region", "COR4"]));
    assert_eq!(cran_stdin(&["fme", "-", "--eliminate", "R9"], &text).status.code(), Some(2));
    assert_eq!(cran(&["region", "NOPE"]).status.code(), Some(2));
    assert_eq!(cran(&["region", "COR4", "--project", "cor4"]).status.code(), Some(2));
    assert_eq!(cran(&["no-such-command"]).status.code(), Some(2));
}

fn sweep_config(dir: &Path, schemes: &str) -> std::path::PathBuf {
    let path = dir.join("sweep.json");
    let cfg = format!(
        r#"{{
  "P": 1,
  "G": [[1, 0.5], [0.5, 1]],
  "C_grid": [1.0, 0.5],
  "T": [0],
  "schemes": {schemes},
  "budget": {{"restarts": 2, "max_evals": 1500}},
  "seed": 11
}}"#
    );
    fs::write(&path, cfg).unwrap();
    path
}

#[test]
fn sweep_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = sweep_config(dir.path(), r#"["GDS-I", "GCOMP"]"#);
    let out_a = dir.path().join("a.csv");
    let a = cran(&["sumrate-sweep", cfg.to_str().unwrap(), "-o", out_a.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let b = cran(&["sumrate-sweep", cfg.to_str().unwrap()]);
    let csv = fs::read_to_string(&out_a).unwrap();
    assert_eq!(csv, stdout(&b));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "C,T,scheme,sum_rate,cutset,rsum_star");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("0.500000,0.000000,GCOMP,"));
    assert!(lines[2].starts_with("0.500000,0.000000,GDS-I,"));
}

#[test]
fn sweep_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = sweep_config(dir.path(), "[]");
    let o = cran(&["sumrate-sweep", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("schemes"), "{}", stderr(&o));

    let broken = dir.path().join("broken.json");
    fs::write(&broken, "{\n  \"P\": 1,\n  \"G\": [[1, 0.5], [0.5, 1]],\n  \"C_grid\": [1.0,, 2.0]\n}").unwrap();
    let o = cran(&["sumrate-sweep", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("broken.json:4:"), "{}", stderr(&o));
}

#[test]
fn gap_audit_passes_and_emits_json() {
    let o = cran(&["gap-audit", "--instances", "20", "--seed", "5", "--nmax", "3", "--lmax", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["passed"], 20);
    assert_eq!(v["results"].as_array().unwrap().len(), 20);
}

#[test]
fn examples_report_verdicts() {
    let o = cran(&["verify-examples", "--example", "2", "--samples", "200"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["id"], "2a");
    assert_eq!(v[0]["verdict"], "confirmed");
    assert_eq!(v[1]["verdict"], "sampled-consistent");

    let o = cran(&["verify-examples", "--example", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v[0]["values"]["margin"].as_f64().unwrap() > 0.0);

    assert_eq!(cran(&["verify-examples", "--example", "3"]).status.code(), Some(2));
}

#[test]
fn thread_count_must_be_a_positive_integer() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_cran")).args(["region", "COR5"]).env("CRAN_THREADS", v).output().unwrap()
    };
    assert_eq!(run("4").status.code(), Some(0));
    assert_eq!(run("zero").status.code(), Some(2));
    assert_eq!(run("0").status.code(), Some(2));
}
