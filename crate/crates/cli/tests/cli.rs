use std::path::Path;
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

fn loglab(args: &[&str], dir: &Path, config: Option<&str>) -> i32 {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_loglab"));
    cmd.args(args).arg("--out").arg(dir.join("out"));
    if let Some(text) = config {
        let path = dir.join("config.json");
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    let output = cmd.output().unwrap();
    output.status.code().unwrap()
}

fn json(dir: &Path, name: &str) -> Value {
    let text = std::fs::read_to_string(dir.join("out").join(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn csv_rows(dir: &Path, name: &str) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(dir.join("out").join(name)).unwrap();
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn verify_default_covers_registry() {
    let dir = TempDir::new().unwrap();
    assert_eq!(loglab(&["verify"], dir.path(), None), 0);
    let report = json(dir.path(), "report.json");
    assert_eq!(report["status"], "ok");
    assert_eq!(report["coverage"].as_array().unwrap().len(), 23);
    let records = json(dir.path(), "certificates.json");
    assert!(!records.as_array().unwrap().is_empty());
    assert!(dir.path().join("out/certificates.csv").exists());
}

#[test]
fn verify_zero_identity_tolerance_fails() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"ids": ["ibp_identity", "grad_identity"], "tolerances": {"identity": 0.0}}"#;
    assert_eq!(loglab(&["verify"], dir.path(), Some(cfg)), 1);
    let report = json(dir.path(), "report.json");
    assert_eq!(report["status"], "violation");
    assert!(report["failures"].as_u64().unwrap() > 0);
}

#[test]
fn verify_is_deterministic() {
    let cfg = r#"{"ids": ["hardy_dilation", "ibp_identity"], "trials": 2}"#;
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    assert_eq!(loglab(&["verify", "--seed", "5"], a.path(), Some(cfg)), 0);
    assert_eq!(loglab(&["verify", "--seed", "5"], b.path(), Some(cfg)), 0);
    for name in ["certificates.json", "report.json", "certificates.csv"] {
        let x = std::fs::read(a.path().join("out").join(name)).unwrap();
        let y = std::fs::read(b.path().join("out").join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
}

#[test]
fn evolve_keeps_constants() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"evolve": {"profile": {"kind": "constant", "value": 2.0}, "times": [0.1]}}"#;
    assert_eq!(loglab(&["evolve"], dir.path(), Some(cfg)), 0);
    let rows = csv_rows(dir.path(), "evolve_00_t0.1.csv");
    assert!(!rows.is_empty());
    for row in rows {
        let re: f64 = row[1].parse().unwrap();
        let im: f64 = row[2].parse().unwrap();
        assert!((re - 2.0).abs() < 1e-12 && im.abs() < 1e-12, "{row:?}");
    }
}

#[test]
fn evolve_gaussian_methods_agree() {
    let dir = TempDir::new().unwrap();
    assert_eq!(loglab(&["evolve", "--times", "0.01,0.1,1"], dir.path(), None), 0);
    let rows = csv_rows(dir.path(), "crosscheck.csv");
    assert_eq!(rows.len(), 3);
    for row in &rows {
        let discrepancy: f64 = row[5].parse().unwrap();
        assert!(discrepancy <= 1e-8, "{row:?}");
        for col in &row[1..4] {
            let err: f64 = col.parse().unwrap();
            assert!(err <= 1e-8, "{row:?}");
        }
    }
    let files: Vec<_> = std::fs::read_dir(dir.path().join("out"))
        .unwrap()
        .filter_map(|e| e.ok()?.file_name().into_string().ok())
        .filter(|n| n.starts_with("evolve_"))
        .collect();
    assert_eq!(files.len(), 3);
}

#[test]
fn evolve_rejects_negative_time() {
    let dir = TempDir::new().unwrap();
    assert_eq!(loglab(&["evolve", "--times", "-1"], dir.path(), None), 2);
}

#[test]
fn spectrum_gaussian_diagonalizes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(loglab(&["spectrum"], dir.path(), None), 0);
    let dev = &json(dir.path(), "deviations.json")["deviations"];
    for key in ["dilation_shift", "generator", "semigroup"] {
        let d = dev[key]["relative"].as_f64().unwrap();
        assert!(d <= 1e-6, "{key} {d}");
    }
    assert!(!csv_rows(dir.path(), "spectrum.csv").is_empty());
}

#[test]
fn spectrum_of_zero_is_zero() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"spectrum": {"profile": {"kind": "zero"}}}"#;
    assert_eq!(loglab(&["spectrum"], dir.path(), Some(cfg)), 0);
    for row in csv_rows(dir.path(), "spectrum.csv") {
        assert_eq!(row[2].parse::<f64>().unwrap(), 0.0);
        assert_eq!(row[3].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn spectrum_coarse_grid_still_runs() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"grid": {"s_min": -10.0, "s_max": 10.0, "count": 32}}"#;
    assert_eq!(loglab(&["spectrum"], dir.path(), Some(cfg)), 0);
}

#[test]
fn search_hardy_is_nearly_sharp() {
    let dir = TempDir::new().unwrap();
    assert_eq!(loglab(&["search", "--seed", "3"], dir.path(), None), 0);
    let report = json(dir.path(), "search.json");
    let best = report["best"].as_array().unwrap();
    assert!(!best.is_empty());
    for b in best {
        let r = b["best_ratio"].as_f64().unwrap();
        assert!(r <= 1.05, "{r}");
    }
}

#[test]
fn search_unknown_id_is_usage_error() {
    let dir = TempDir::new().unwrap();
    assert_eq!(loglab(&["search", "--ids", "no_such_entry"], dir.path(), None), 2);
}

#[test]
fn search_reports_counterexample() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"tolerances": {"inequality": -0.5}}"#;
    assert_eq!(loglab(&["search"], dir.path(), Some(cfg)), 1);
    let cex = json(dir.path(), "counterexample.json");
    assert_eq!(cex["status"], "violation");
    assert!(cex["trial"]["parameters"].as_array().is_some());
    assert!(cex["ratio"].as_f64().unwrap() > 0.0);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = TempDir::new().unwrap();
    assert_eq!(loglab(&["verify"], dir.path(), Some(r#"{"sead": 1}"#)), 2);
    assert_eq!(loglab(&["spectrum"], dir.path(), Some(r#"{"spectrum": {"shfit": 1}}"#)), 2);
}

#[test]
fn flags_override_config() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"seed": 1, "ids": ["hardy_dilation"], "trials": 1}"#;
    assert_eq!(loglab(&["verify", "--seed", "9", "--ids", "ibp_identity"], dir.path(), Some(cfg)), 0);
    let report = json(dir.path(), "report.json");
    assert_eq!(report["seed"], 9);
    let records = json(dir.path(), "certificates.json");
    assert!(records.as_array().unwrap().iter().all(|r| r["id"] == "ibp_identity"));
}
