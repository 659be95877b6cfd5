//! End-to-end checks of the `nsfd` binary: subcommand wiring, manifest
//! loading, and the exit-code contract (0 ok, 1 bad config, 2 non-finite
//! trajectory, 3 property violation).

use std::process::{Command, Output};

fn nsfd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsfd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn run_from_manifest_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let out = nsfd(&[
        "run",
        "--config",
        "manifests/fig5_nsfd_dt1.json",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("k,t,y1,y2,V,dV\n"));
    // header + 1001 states for 1000 steps
    assert_eq!(text.lines().count(), 1002);
}

#[test]
fn flags_override_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let out = nsfd(&[
        "run",
        "--config",
        "manifests/fig5_nsfd_dt1.json",
        "--steps",
        "10",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 12);
}

#[test]
fn bad_input_exits_1() {
    assert_eq!(nsfd(&["run", "--method", "bogus"]).status.code(), Some(1));
    assert_eq!(nsfd(&["run", "--dt", "-1"]).status.code(), Some(1));
    assert_eq!(
        nsfd(&["run", "--steps", "5", "--final-time", "5"]).status.code(),
        Some(1)
    );
    assert_eq!(
        nsfd(&["run", "--config", "manifests/no_such_file.json"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn divergent_trajectory_exits_2() {
    let out = nsfd(&[
        "run",
        "--method",
        "euler",
        "--dt",
        "1000",
        "--y0",
        "1e100,0",
        "--final-time",
        "1e6",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn property_suite_passes_on_the_default_scheme() {
    let out = nsfd(&["property-suite", "--samples", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("lyapunov-decrease: pass"));
    assert!(text.contains("variation-identity: pass"));
    // the default planar system is not quasi-positive
    assert!(text.contains("positivity: skipped"));
}

#[test]
fn property_suite_flags_a_broken_weight() {
    // tau = 0 is plain Euler, which violates the decrease at large dt
    let out = nsfd(&[
        "property-suite",
        "--weight",
        "constant:0",
        "--samples",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("lyapunov-decrease: FAIL"));
}

#[test]
fn compare_prints_one_row_per_method() {
    let out = nsfd(&["compare", "--final-time", "50", "--dt", "0.8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 4);
    assert!(text.contains("nsfd"));
    assert!(text.contains("euler"));
}
