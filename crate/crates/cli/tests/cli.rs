//! End-to-end tests of the `psvf` binary: exit codes, output formats, and
//! the simulate -> CSV -> itinerary pipeline.

use std::path::PathBuf;
use std::process::{Command, Output};

fn psvf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psvf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("psvf-cli-test-{}-{name}", std::process::id()))
}

#[test]
fn describe_reports_fold_classification() {
    let out = psvf(&["fields", "describe", "--family", "k2", "--at", "0,0.5,0.2"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["family"], "k2");
    let points = doc["points"].as_array().unwrap();
    assert_eq!(points.len(), 3);
    // the two-fold at the origin is visible-visible
    assert_eq!(points[0]["fold"], "VisibleVisible");
    // the boundary root at 1/2 is a crossing
    assert!(points[1]["class"].as_str().unwrap().starts_with("Crossing"));
}

#[test]
fn synth_then_itinerary_round_trips() {
    let csv = tmp("word.csv");
    let out = psvf(&[
        "traj",
        "synth",
        "--family",
        "k3",
        "--word",
        "0,1,3,2,0",
        "--offset",
        "-2",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = psvf(&[
        "traj",
        "itinerary",
        "--family",
        "k3",
        "--input",
        csv.to_str().unwrap(),
        "--from",
        "-2",
        "--to",
        "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["offset"], -2);
    assert_eq!(doc["symbols"], serde_json::json!([0, 1, 3, 2, 0]));
    std::fs::remove_file(&csv).ok();
}

#[test]
fn simulate_reports_branching() {
    let out = psvf(&[
        "traj", "simulate", "--family", "k3", "--x", "-0.5", "--y", "0", "--horizon", "3",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["branches"].as_u64().unwrap() >= 4);
    assert_eq!(doc["truncated"], false);
}

#[test]
fn shift_metric_and_mixing() {
    let out = psvf(&[
        "shift", "metric", "--family", "k3", "--a", "0,1,3", "--b", "0,1,2",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // the words differ only at index 2: |3 - 2| / 2^2
    assert!((doc["value"].as_f64().unwrap() - 0.25).abs() < 1e-12);

    let out = psvf(&["shift", "mixing", "--k", "3", "--max-period", "4"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["mixing_time"], 2);
    assert_eq!(doc["periodic_counts"], serde_json::json!([2, 4, 8, 16]));
}

#[test]
fn verify_conjugacy_passes_for_bean() {
    let out = psvf(&["verify", "conjugacy", "--family", "bean", "--samples", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn verify_equivalence_distinguishes_families() {
    let out = psvf(&["verify", "equivalence", "--left", "k2", "--right", "k2"]);
    assert!(out.status.success());
    let out = psvf(&["verify", "equivalence", "--left", "k2", "--right", "k3"]);
    assert_eq!(out.status.code(), Some(1), "mismatch must exit 1");
}

#[test]
fn portrait_writes_svg() {
    let svg = tmp("portrait.svg");
    let out = psvf(&[
        "fields",
        "portrait",
        "--family",
        "bean",
        "--out",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let body = std::fs::read_to_string(&svg).unwrap();
    assert!(body.starts_with("<svg"));
    std::fs::remove_file(&svg).ok();
}

#[test]
fn usage_errors_exit_2() {
    let out = psvf(&["fields", "describe", "--at", "0"]);
    assert_eq!(out.status.code(), Some(2), "missing input must exit 2");
    let out = psvf(&["traj", "synth", "--family", "k3", "--word", "0,9"]);
    assert_eq!(out.status.code(), Some(2), "bad symbol must exit 2");
}
