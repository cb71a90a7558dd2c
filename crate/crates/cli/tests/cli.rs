use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const CANONICAL: &str = r#"{"masses": [0.3333333333333333, 0.3333333333333333, 0.3333333333333333],
    "alpha": 1, "beta": 2, "mode": "attractive-repulsive",
    "couplings": {"A": 0.1111111111111111, "B": 0.05555555555555555, "k": 1, "k1": 1}}"#;

fn qcc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcc"))
        .args(args)
        .env("QCC_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn config_errors_exit_one_and_name_the_field() {
    let dir = TempDir::new().unwrap();
    let bad_mode = write(&dir, "mode.json", &CANONICAL.replace("attractive-repulsive", "repulsive"));
    let out = qcc(&["ktilde", "--config", arg(&bad_mode)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mode"));

    let bad_beta = write(&dir, "beta.json", &CANONICAL.replace("\"beta\": 2", "\"beta\": 0.5"));
    let out = qcc(&["ktilde", "--config", arg(&bad_beta)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("beta"));

    let out = qcc(&["ktilde", "--config", arg(&dir.path().join("missing.json"))]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn count_reports_families_and_exits_two_when_empty() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", CANONICAL);
    let out = qcc(&["count", "--config", arg(&cfg), "--inertia", "10"]);
    assert!(out.status.success());
    let report = json(&out);
    assert_eq!(report["count"], 2);
    let families: Vec<_> = report["solutions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["family"].as_str().unwrap().to_owned())
        .collect();
    assert!(families.contains(&"HHH".to_owned()));

    let out = qcc(&["count", "--config", arg(&cfg), "--inertia", "0.3"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["count"], 0);
}

#[test]
fn solve_then_verify_round_trip() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", CANONICAL);
    let out = qcc(&["solve", "--config", arg(&cfg), "--omega2", "0.05"]);
    assert!(out.status.success());
    let report = json(&out);
    assert_eq!(report["count"], 3);
    let sols = write(&dir, "sols.json", &String::from_utf8_lossy(&out.stdout));

    let out = qcc(&["verify", "--config", arg(&cfg), "--solution", arg(&sols)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let checked = json(&out);
    assert_eq!(checked["passed"], 3);
    for row in checked["solutions"].as_array().unwrap() {
        assert!(row["cc_residual"].as_f64().unwrap() <= 1e-9);
        assert!(row["periodicity_error"].as_f64().unwrap() <= 1e-6);
    }

    // clockwise rotation is just as valid
    let mut first = report["solutions"][0].clone();
    first["omega"] = Value::from(-0.05f64.sqrt());
    let neg = write(&dir, "neg.json", &first.to_string());
    let out = qcc(&["verify", "--config", arg(&cfg), "--solution", arg(&neg)]);
    assert!(out.status.success());

    let mut bent = report["solutions"][0].clone();
    bent["r12"] = Value::from(bent["r12"].as_f64().unwrap() * 1.01);
    let bent = write(&dir, "bent.json", &bent.to_string());
    let out = qcc(&["verify", "--config", arg(&cfg), "--solution", arg(&bent)]);
    assert_eq!(out.status.code(), Some(4));
    let row = &json(&out)["solutions"][0];
    assert!(row["cc_residual"].as_f64().unwrap() > 1e-4);
    assert_eq!(row["pass"], false);
}

#[test]
fn solve_above_the_peak_is_empty() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", CANONICAL);
    let out = qcc(&["solve", "--config", arg(&cfg), "--omega2", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn collinear_counts_per_ordering() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", CANONICAL);
    let out = qcc(&["collinear", "--config", arg(&cfg), "--omega2", "0.03"]);
    assert!(out.status.success());
    let report = json(&out);
    assert_eq!(report["total"], 12);
    let orders = report["orders"].as_array().unwrap();
    assert_eq!(orders.len(), 3);
    for o in orders {
        assert_eq!(o["count"], 4);
    }

    let out = qcc(&["collinear", "--config", arg(&cfg), "--omega2", "0.08"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ktilde_of_the_canonical_shape() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", CANONICAL);
    let out = qcc(&["ktilde", "--config", arg(&cfg)]);
    assert!(out.status.success());
    let report = json(&out);
    assert!((report["k_tilde"].as_f64().unwrap() - 3.2).abs() < 1e-9);
    assert_eq!(report["k_exceeds"], false);
}

fn family<'a>(meta: &'a Value, label: &str) -> &'a Value {
    meta["families"]
        .as_array()
        .unwrap()
        .iter()
        .find(|f| f["label"] == label)
        .unwrap_or_else(|| panic!("{label} missing from meta"))
}

#[test]
fn analyze_past_the_threshold() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "k4.json",
        r#"{"masses": [1, 1, 1], "alpha": 1, "beta": 2, "mode": "attractive-repulsive",
            "couplings": {"A": 1, "B": 0.5, "k": 4, "k1": 1}, "grid": 400}"#,
    );
    let out_dir = dir.path().join("out");
    let out = qcc(&["analyze", "--config", arg(&cfg), "--out", arg(&out_dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["families.csv", "bifurcations.json", "meta.json"] {
        assert!(out_dir.join(name).is_file(), "{name}");
    }
    let meta: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("meta.json")).unwrap()).unwrap();
    assert_eq!(meta["k"], 4.0);
    assert!(meta["k_tilde"].as_f64().unwrap() < 4.0);
    assert_eq!(family(&meta, "LHL")["valid_samples"], 0);
    assert_eq!(family(&meta, "LHH")["valid_samples"], 0);
    assert!(family(&meta, "HHH")["valid_samples"].as_u64().unwrap() > 0);

    let csv = fs::read_to_string(out_dir.join("families.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header, "family_label,eta,r12,r13,r23,inertia,triangle_status,class");
    assert!(!csv.contains('\r'));
}

#[test]
fn analyze_attractive_attractive_has_no_bifurcations() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "aa.json",
        r#"{"masses": [1, 2, 3], "alpha": 1, "beta": 2, "mode": "attractive-attractive",
            "couplings": {"A": 1, "B": 0.5, "k": 1.3, "k1": 0.8}, "grid": 200}"#,
    );
    let out_dir = dir.path().join("out");
    let out = qcc(&["analyze", "--config", arg(&cfg), "--out", arg(&out_dir), "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bif: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("bifurcations.json")).unwrap()).unwrap();
    assert_eq!(bif.as_array().unwrap().len(), 0);
    let rows: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("families.json")).unwrap()).unwrap();
    let rows = rows.as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows[0].get("family_label").is_some());
}
