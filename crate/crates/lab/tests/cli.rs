use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_transduce-lab")).args(args).output().expect("binary runs")
}

fn write_config(dir: &TempDir, body: &str) -> String {
    let path = dir.path().join("config.json");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(str::to_owned).collect()).collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn compare_orders_the_three_methods() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, r#"{"delta_grid": [0.25], "eps_grid": [0.01]}"#);
    let out = lab(&["compare", "--config", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 1);
    let get = |name: &str| rows[0][col(&h, name)].parse::<f64>().unwrap();
    assert!((get("purifier_L") - 2.0).abs() < 1e-9);
    assert!(get("qsp_queries") > 2.0);
    assert!(get("majority_queries") > get("qsp_queries"));
}

#[test]
fn empty_grid_gives_header_only() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, r#"{"p_grid": []}"#);
    let out = lab(&["purify", "--config", &cfg]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "p,L,W,tau_error,bound_2sqrtWK,measured_action_error\n");
}

#[test]
fn config_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let cases = [
        r#"{"p_grid": [0.1"#,
        r#"{"p_grid": [0.1], "unknown": 1}"#,
        r#"{"p_grid": [0.5]}"#,
        r#"{"depth": 6}"#,
        r#"{"eps_grid": [0.0]}"#,
    ];
    for body in cases {
        let cfg = write_config(&dir, body);
        let out = lab(&["purify", "--config", &cfg]);
        assert_eq!(out.status.code(), Some(2), "{body}");
        assert!(out.stdout.is_empty(), "{body}");
        assert!(!out.stderr.is_empty(), "{body}");
    }
    let missing = dir.path().join("absent.json");
    assert_eq!(lab(&["purify", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(lab(&["purify", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(lab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn contract_violation_exits_with_one() {
    // A sign polynomial this sharp is over the degree cap.
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, r#"{"delta": 0.01, "eps_grid": [0.001], "p_grid": [0.1]}"#);
    let out = lab(&["qsp", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degree cap"));
}

#[test]
fn reports_are_deterministic_per_seed() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, r#"{"eps_grid": [0.3], "p_grid": [0.1, 0.9], "samples": 3}"#);
    let a = lab(&["qsp", "--config", &cfg, "--seed", "7"]);
    let b = lab(&["qsp", "--config", &cfg, "--seed", "7"]);
    let c = lab(&["qsp", "--config", &cfg, "--seed", "8"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn floats_carry_seventeen_significant_digits() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, r#"{"ell_grid": [3], "p_grid": [0.2], "d_w": 1}"#);
    let out = lab(&["majority", "--config", &cfg]);
    let (h, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    for name in ["p", "delta", "imprecision_exact", "imprecision_simulated", "hoeffding_bound"] {
        let cell = &rows[0][col(&h, name)];
        let mantissa = cell.split(['e', 'E']).next().unwrap();
        let digits = mantissa.chars().filter(char::is_ascii_digit).count();
        assert_eq!(digits, 17, "{name} = {cell}");
        assert!(!cell.contains(','));
    }
    assert_eq!(rows[0][col(&h, "qubits_used")], "6");
    assert_eq!(rows[0][col(&h, "queries")], "6");
}

#[test]
fn json_output_to_file() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, r#"{"delta_grid": [0.25, 0.4], "depth": 32}"#);
    let path = dir.path().join("report.json");
    let out = lab(&["adversary", "--config", &cfg, "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(Path::new(&path)).unwrap()).unwrap();
    assert_eq!(v["command"], "adversary");
    assert_eq!(v["config"]["depth"], 32);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for (row, delta) in rows.iter().zip([0.25, 0.4]) {
        assert_eq!(row["delta"].as_f64().unwrap(), delta);
        let lb = row["lower_bound"].as_f64().unwrap();
        assert!((lb - 1.0 / (2.0 * delta)).abs() < 1e-12);
        assert!(row["gap"].as_f64().unwrap().abs() < 1e-6);
    }
}
