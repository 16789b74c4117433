use std::path::Path;
use std::process::{Command, Output};

use okidyn::config::TABLE1_JSON;
use serde_json::Value;

fn okidyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_okidyn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, edit: impl FnOnce(&mut Value)) -> String {
    let mut v: Value = serde_json::from_str(TABLE1_JSON).unwrap();
    edit(&mut v);
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    path.to_str().unwrap().to_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn missing_config_exits_one_and_names_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    let out = okidyn(&[
        "simulate",
        "--config",
        missing.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.json"));
}

#[test]
fn non_viable_economy_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), |v| v["b0"] = 5.0.into());
    let out = okidyn(&["simulate", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_requires_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), |_| {});
    let out = okidyn(&["sweep", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fixed_wage_profit_rate_never_falls() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), |v| v["beta"] = 0.0.into());
    let out_dir = dir.path().join("out");
    let out = okidyn(&["simulate", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_path(out_dir.join("trajectory.csv")).unwrap();
    let col = rdr.headers().unwrap().iter().position(|h| h == "r").unwrap();
    let r: Vec<f64> = rdr
        .records()
        .map(|rec| rec.unwrap()[col].parse().unwrap())
        .collect();
    assert!(r.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn low_betas_are_technology_dominated() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), |_| {});
    let out_dir = dir.path().join("out");
    let out = okidyn(&[
        "sweep",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
        "--beta-grid",
        "0.1:0.2:2",
    ]);
    assert!(out.status.success());
    let reports = read_json(&out_dir.join("regimes.json"));
    let regimes: Vec<&str> = reports
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["regime"].as_str().unwrap())
        .collect();
    assert_eq!(regimes, ["technology_dominated", "technology_dominated"]);
}

#[test]
fn constant_technology_has_equal_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), |v| v["paths"] = Value::Array(vec![]));
    let out_dir = dir.path().join("out");
    let out = okidyn(&["thresholds", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let th = read_json(&out_dir.join("thresholds.json"));
    assert_eq!(th["beta_min"], th["beta_max"]);
}

#[test]
fn beta_at_upper_threshold_is_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), |_| {});
    let out_dir = dir.path().join("out");
    let out = okidyn(&[
        "classify",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
        "--beta",
        "3.8",
    ]);
    assert!(out.status.success());
    assert_eq!(read_json(&out_dir.join("regime.json"))["regime"], "boundary");
}
