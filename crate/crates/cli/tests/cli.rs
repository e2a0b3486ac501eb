use std::process::{Command, Output};

use serde_json::Value;

fn koba(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_koba")).args(args).env_remove("KOBA_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn dini_log_family() {
    let o = koba(&["dini", "--modulus", "log:1", "--sigma", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let row = out.lines().nth(1).unwrap();
    let value: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert!((value - 1.442695).abs() < 1e-6, "{row}");
}

#[test]
fn unknown_modulus_is_a_config_error() {
    let o = koba(&["dini", "--modulus", "bogus:1", "--sigma", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown modulus kind"));
    assert!(stdout(&o).is_empty());
}

#[test]
fn almost_geodesic_header() {
    let o = koba(&["almost-geodesic", "--domain", "ball:2", "--xi", "1,0,0,0", "--eps", "0.25", "--T", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().next(), Some("s,t,lo,hi,defect"));
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"experiment": "dini", "modulus": "linear:1", "sigma": 0.25}"#).unwrap();
    let out = dir.path().join("r.csv");
    let o = koba(&["dini", "--config", cfg.to_str().unwrap(), "--sigma", "0.5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("modulus,sigma,value,status,blocks\nlinear:1,5.0000000000000000e-1,"), "{csv}");
    let j: Value = serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    assert_eq!(j["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(j["config"]["sigma"], 0.5);
    assert_eq!(j["config"]["modulus"], "linear:1");
    assert_eq!(j["status"], "ok");

    std::fs::write(&cfg, r#"{"modulus": "linear:1", "colour": 3}"#).unwrap();
    let o = koba(&["dini", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("colour"));

    std::fs::write(&cfg, r#"{"experiment": "metric"}"#).unwrap();
    let o = koba(&["dini", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_thread_count() {
    let o = Command::new(env!("CARGO_BIN_EXE_koba")).args(["dini"]).env("KOBA_THREADS", "0").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("KOBA_THREADS"));
}

#[test]
fn certificate_needs_a_seed() {
    let o = koba(&["model-check", "--domain", "ball:1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("seed"));
}

#[test]
fn distance_on_the_disc() {
    let o = koba(&["distance", "--domain", "disc", "--p", "0,0", "--q", "0.5,0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let header: Vec<&str> = out.lines().next().unwrap().split(',').collect();
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    let col = |name: &str| -> f64 { row[header.iter().position(|h| *h == name).unwrap()].parse().unwrap() };
    let exact = 0.5f64.atanh();
    assert!(col("lo") <= exact && exact <= col("hi"));
    assert!(col("hi") - col("lo") < 1e-9);
}

#[test]
fn outside_point_is_rejected() {
    let o = koba(&["distance", "--domain", "disc", "--p", "0,0", "--q", "1.5,0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reruns_are_identical() {
    let args = ["gromov", "--domain", "ball:1", "--x", "0.5,0", "--y", "-0.5,0.1", "--o", "0,0"];
    let (a, b) = (koba(&args), koba(&args));
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
}
