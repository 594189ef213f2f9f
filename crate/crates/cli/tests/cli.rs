use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn resonant(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resonant"))
        .args(args)
        .env_remove("RESONANT_THREADS")
        .output()
        .expect("spawn resonant")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn two_point_count_matches_oracle() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "two.csv", "x,y,z,w_re\n0,0,0,1\n3,1,-2,1\n");
    let o = resonant(&["count", s(&f), "--oracle"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["agree"], true);
    assert_eq!(v["bucketed"]["omega"], 6);
}

#[test]
fn short_cone_line() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "line.csv", "x,y,z,w_re\n1,1,0,1\n2,2,0,1\n3,3,0,1\n");
    let o = resonant(&["count", s(&f)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&o)["omega"], 19);
}

#[test]
fn extremizer_output_feeds_count() {
    let d = TempDir::new().unwrap();
    let f = d.path().join("ext.csv");
    let o = resonant(&["extremizer", "--kind", "line", "--n", "3", "--indicator", "-o", s(&f)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = resonant(&["count", s(&f)]);
    assert_eq!(json(&o)["omega"], 19);
}

#[test]
fn malformed_row_is_a_parse_error() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "bad.csv", "x,y,z,w_re\n1,1,0,1\n1,x,0,1\n");
    let o = resonant(&["count", s(&f)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn line_scaling_slope() {
    let o = resonant(&["scaling", "--kind", "line", "--ns", "8,16,32,64"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let fit = text.lines().find_map(|l| l.strip_prefix("# fit ")).expect("fit line");
    let slope = serde_json::from_str::<Value>(fit).unwrap()["slope"].as_f64().unwrap();
    assert!((slope - 0.25).abs() < 0.02, "slope {slope}");
    assert_eq!(text.lines().next(), Some("n,norm,ratio"));
}

#[test]
fn cube_ratios_increase() {
    let o = resonant(&["scaling", "--kind", "cube", "--ns", "4,6,8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let ratios: Vec<f64> = text
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(ratios.len(), 3);
    assert!(ratios.windows(2).all(|w| w[0] < w[1]), "{ratios:?}");
}

#[test]
fn unknown_kind_is_a_usage_error() {
    let o = resonant(&["scaling", "--kind", "sphere", "--ns", "4,8"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn zero_tolerance_fails_suite_check() {
    let d = TempDir::new().unwrap();
    let cfg = write(&d, "suite.toml", "[tolerances]\nl4_quadrature_rel = 0.0\n");
    let o = resonant(&["suite", "--config", s(&cfg), "--check", "l4_identity"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("l4_identity"));
    let v = json(&o);
    assert_eq!(v["passed"], false);
    assert_eq!(v["checks"][0]["name"], "l4_identity");
}

#[test]
fn missing_golden_is_named() {
    let o = resonant(&["suite", "--goldens", "/nonexistent/goldens.json", "--check", "goldens"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    let failures = v["checks"][0]["failures"].as_array().unwrap();
    assert!(failures[0].as_str().unwrap().starts_with("golden missing"));
}

#[test]
fn quick_suite_passes() {
    let o = resonant(&["suite", "--check", "line_closed_form", "--check", "l4_identity"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&o)["passed"], true);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = resonant(&["suite", "--check", "oracle_equivalence", "--check", "goldens"]);
    let b = resonant(&["suite", "--check", "oracle_equivalence", "--check", "goldens"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let c = resonant(&["parabola", "--scan", "--trials", "200"]);
    let e = resonant(&["parabola", "--scan", "--trials", "200"]);
    assert_eq!(c.stdout, e.stdout);
}

#[test]
fn budget_exceeded_exits_3() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "two.csv", "x,y,z,w_re\n0,0,0,1\n3,1,-2,1\n");
    let o = resonant(&["--budget", "10", "count", s(&f), "--oracle"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("budget"));
}

#[test]
fn evolve_writes_diagnostics_and_state() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "u0.csv", "x,y,z,w_re,w_im\n1,0,0,0.5,0\n0,1,1,0,0.5\n");
    let state = d.path().join("state.csv");
    let o = resonant(&[
        "evolve", s(&f), "--radius", "2", "--grid", "16", "--dt", "0.001", "--steps", "20", "--record-every", "10",
        "--state-out", s(&state),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "step,t,mass,h_half");
    let masses: Vec<f64> = rows[1..].iter().map(|r| r.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!(masses.iter().all(|m| (m - masses[0]).abs() < 1e-10), "{masses:?}");
    assert!(fs::read_to_string(&state).unwrap().starts_with("x,y,z,w_re,w_im"));
}

#[test]
fn incidence_and_rich_lines() {
    let d = TempDir::new().unwrap();
    let pts = write(&d, "p.csv", "x,y\n0,0\n1,1\n2,2\n0,1\n");
    let lines = write(&d, "l.csv", "a,b,c\n1,-1,0\n1,0,0\n");
    let o = resonant(&["incidence", "--points", s(&pts), "--lines", s(&lines)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&o)["incidences"], 5);
    let sp = write(&d, "s.csv", "x,y,z\n0,0,0\n1,1,1\n2,2,2\n1,0,0\n");
    let o = resonant(&["rich-lines", s(&sp), "--k", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&o)["lines"], 1);
}
