use fss_core::distributions::sample as draw;
use fss_core::io::{read_angles, read_curve, write_sphere_points};
use fss_core::{AngleUnit, DistributionSpec, RandomStream};
use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fss")).args(args).output().expect("run fss")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&fss(&["--help"])), 0);
    assert_eq!(code(&fss(&["simulate-modulation", "--help"])), 0);
    assert_eq!(code(&fss(&["--version"])), 0);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&fss(&["frobnicate"])), 1);
    assert_eq!(code(&fss(&["simulate-modulation", "--dist", "{}"])), 1);
    let out = fss(&[
        "simulate-modulation", "--dist", r#"{"type":"von_mises","mu":0,"kappa":1}"#,
        "--n-grid", "0,5", "--replicates", "10",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn data_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    assert_eq!(code(&fss(&["bootstrap-modulation", "--input", path(&missing)])), 2);

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "angle\n0.1\nnorth\n0.3\n").unwrap();
    let out = fss(&["ingest-angles", "--input", path(&bad), "--unit", "rad"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 2"));

    let out = fss(&["limit", "--dist", r#"{"type":"von_mises","mu":0,"kappa":-1}"#]);
    assert_eq!(code(&out), 2);
}

#[test]
fn numerical_errors_exit_three() {
    // A ring beyond the feasibility threshold with full weight is smeary.
    let out = fss(&["limit", "--dist", r#"{"type":"ring_mixture","m":2,"theta":2.5,"alpha":1.0}"#]);
    assert_eq!(code(&out), 3);
    assert_eq!(code(&fss(&["ring-search", "--m", "4", "--target", "1e300"])), 3);
}

#[test]
fn identical_samples_give_unit_p_values() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("a.csv");
    fs::write(&file, "angle\n0.1\n-0.4\n0.9\n1.3\n-1.0\n0.2\n0.5\n-0.3\n1.1\n0.0\n-0.8\n0.6\n").unwrap();
    let reports = stdout_json(&fss(&[
        "test", "--method", "both", "--sample1", path(&file), "--sample2", path(&file), "--B", "200",
    ]));
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 2);
    for r in reports {
        assert_eq!(r["statistic"].as_f64(), Some(0.0));
        assert_eq!(r["p_value"].as_f64(), Some(1.0));
    }
    let single = stdout_json(&fss(&[
        "test", "--method", "quantile", "--sample1", path(&file), "--sample2", path(&file),
    ]));
    assert_eq!(single["method"], "quantile");
}

#[test]
fn two_point_curve_classifies_as_euclidean() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("curve.csv");
    let spec = dir.path().join("spec.json");
    fs::write(&spec, r#"{"type":"two_point","a":-0.7853981633974483,"b":0.7853981633974483,"w":0.5}"#).unwrap();
    let out = fss(&[
        "--out", path(&curve), "simulate-modulation", "--dist", path(&spec),
        "--n-grid", "log:2:200:5", "--replicates", "2000",
    ]);
    assert!(out.status.success());
    let parsed = read_curve(fs::read(&curve).unwrap().as_slice()).unwrap();
    assert_eq!(parsed.entries.len(), 5);
    for e in &parsed.entries {
        assert!((e.modulation - 1.0).abs() <= (3.0 * e.se).max(0.05), "{e:?}");
    }
    let class = stdout_json(&fss(&["classify", "--curve", path(&curve), "--limit", "1"]));
    assert_eq!(class["label"], "Euclidean");
}

#[test]
fn json_curve_matches_csv_curve() {
    let dist = r#"{"type":"von_mises","mu":0.3,"kappa":2.0}"#;
    let args = ["simulate-modulation", "--dist", dist, "--n-grid", "1,10", "--replicates", "50"];
    let csv = fss(&args);
    let mut with_json = vec!["--json"];
    with_json.extend(args);
    let json = stdout_json(&fss(&with_json));
    let curve = read_curve(csv.stdout.as_slice()).unwrap();
    let entries = json["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert_eq!(entries[0]["modulation"].as_f64(), Some(1.0));
    for (e, j) in curve.entries.iter().zip(entries) {
        assert_eq!(j["n"].as_u64(), Some(e.n));
        assert!((j["modulation"].as_f64().unwrap() - e.modulation).abs() <= 1e-8 * e.modulation.max(1.0));
    }
}

#[test]
fn ingested_angles_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw.csv");
    fs::write(&raw, "angle,calm\n0,0\n90,0\n180,0\n270.5,0\n12,1\n359.9,0\n").unwrap();
    let rad = dir.path().join("rad.csv");
    let out = fss(&["--out", path(&rad), "ingest-angles", "--input", path(&raw), "--unit", "deg"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipped 1 calm"));
    let first = read_angles(fs::File::open(&rad).unwrap(), "rad", AngleUnit::Radians).unwrap();
    assert_eq!(first.n, 5);
    assert_eq!(first.angles[2], -std::f64::consts::PI);

    let again = dir.path().join("again.csv");
    assert!(fss(&["--out", path(&again), "ingest-angles", "--input", path(&rad), "--unit", "rad"]).status.success());
    assert_eq!(fs::read(&rad).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn sphere_points_feed_bootstrap_modulation() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("points.csv");
    let spec = DistributionSpec::von_mises_fisher(2, None, 20.0).unwrap();
    let sample = draw(&spec, 100, &RandomStream::new(5)).unwrap();
    write_sphere_points(fs::File::create(&file).unwrap(), &sample).unwrap();
    let result = stdout_json(&fss(&["--seed", "3", "bootstrap-modulation", "--input", path(&file), "--m", "2", "--B", "400"]));
    let estimate = result["estimate"].as_f64().unwrap();
    assert!((0.8..1.2).contains(&estimate), "{estimate}");
    assert_eq!(result["n"].as_u64(), Some(100));
    assert_eq!(result["B"].as_u64(), Some(400));
}

#[test]
fn limit_and_ring_search_emit_json() {
    let limit = stdout_json(&fss(&["limit", "--dist", r#"{"type":"rot_sym","m":2,"atoms":[[1.5707963267948966,1.0]]}"#]));
    assert!((limit["limit_modulation"].as_f64().unwrap() - 4.0).abs() < 1e-9);
    let search = stdout_json(&fss(&["ring-search", "--m", "4", "--target", "10"]));
    assert!(search["achieved_limit"].as_f64().unwrap() > 10.0);
    assert_eq!(search["proven_regime"], true);
}

#[test]
fn rejection_curve_is_reproducible() {
    let args = [
        "--seed", "4", "rejection-curve", "--dist", r#"{"type":"von_mises","mu":0,"kappa":1}"#,
        "--offsets", "lin:-0.5:0.5:3", "--n", "20", "--replicates", "100", "--method", "quantile",
    ];
    let a = fss(&args);
    let b = fss(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("offset,method,n,level,rejections,replicates,rate,se"));
}
