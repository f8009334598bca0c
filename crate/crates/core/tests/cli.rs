use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sarkozy"));
    c.env_remove("SARKOZY_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sarkozy-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn bound_with_n() {
    let v = json(&run(&["bound", "--q", "2", "--k", "2", "--n", "10"]));
    assert!((v["t"].as_f64().unwrap() - 1.93783).abs() < 1e-4);
    let expect = v["c"].as_f64().unwrap() * v["t"].as_f64().unwrap().powi(10);
    assert!((v["value"]["bound"].as_f64().unwrap() - expect).abs() < 1e-9 * expect);
    let exact = json(&run(&["bound", "--q", "2", "--k", "2", "--d", "exact"]));
    assert!((exact["x_star"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-6);
}

#[test]
fn table_is_csv() {
    let out = run(&["table", "--qmax", "4", "--kmax", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "q,k,d_paper,d_exact,x_star,t,c");
    assert_eq!(lines.len(), 1 + 3 * 3);
}

#[test]
fn phi_and_construct() {
    let v = json(&run(&["phi", "--q", "3", "--F", "b^2", "--n", "3"]));
    assert_eq!(v["m"], 2);
    assert_eq!(v["phis"].as_array().unwrap().len(), 3);
    for d in ["exact", "paper"] {
        let v = json(&run(&["construct", "--q", "3", "--F", "b^2", "--n", "3", "--d", d]));
        assert_eq!(v["checks"]["support"], true);
        assert_eq!(v["identity"]["ok"], true);
        assert!(v["deg_p"].as_f64().unwrap() <= v["degree_bound"].as_f64().unwrap());
    }
}

#[test]
fn certify_all_and_file() {
    let v = json(&run(&["certify", "--q", "2", "--F", "b^2", "--n", "3", "--all"]));
    assert_eq!(v["pass"], true);
    assert_eq!(v["split_verified"], true);
    let path = scratch("set.json");
    std::fs::write(&path, "[0, 2]").unwrap();
    let v = json(&run(&["certify", "--q", "2", "--F", "b^2", "--n", "2", "--set", path.to_str().unwrap()]));
    assert_eq!(v["rank"], 2);
    assert_eq!(v["diagonal"], true);
}

#[test]
fn search_poly_and_field() {
    let v = json(&run(&["search", "--setting", "poly", "--q", "2", "--F", "b^2", "--n", "2"]));
    assert_eq!(v["alpha"], 2);
    assert_eq!(v["witness"], serde_json::json!([0, 2]));
    let v = json(&run(&["search", "--setting", "field", "--p", "2", "--F", "b^2", "--n", "2"]));
    assert_eq!(v["alpha"], 1);
    let out = run(&["search", "--q", "2", "--F", "b^2", "--n", "6", "--limit", "16"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn compare_rows_respect_bound() {
    let out = run(&["compare", "--qmax", "3", "--kmax", "2", "--nmax", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let alpha: f64 = cols[3].parse().unwrap();
        let bound: f64 = cols[4].parse().unwrap();
        assert!(alpha <= bound, "{line}");
    }
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 3);
}

#[test]
fn prove_given_and_search() {
    let path = scratch("a.txt");
    std::fs::write(&path, "0 1 2 3").unwrap();
    let v = json(&run(&["prove", "--q", "2", "--F", "b^2+b", "--n", "2", "--set", path.to_str().unwrap()]));
    assert_eq!(v["certificate"]["rank"], 4);
    assert_eq!(v["schema_version"], 1);
    let v = json(&run(&["prove", "--q", "3", "--F", "b^2", "--n", "2"]));
    assert_eq!(v["inputs"]["set_source"], "search");

    std::fs::write(&path, "0,1").unwrap();
    let out = run(&["prove", "--q", "2", "--F", "b^2", "--n", "2", "--set", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not free"));
}

#[test]
fn sweep_with_summary() {
    let cfg = scratch("sweep.json");
    let summary = scratch("summary.csv");
    std::fs::write(&cfg, r#"{"q": [2], "k": [2], "n": [1, 2, 3, 4]}"#).unwrap();
    let v = json(&run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]));
    assert_eq!(v["entries"].as_array().unwrap().len(), 4);
    let csv = std::fs::read_to_string(&summary).unwrap();
    assert!(csv.starts_with("q,k,n,gamma,two_t,bound,ok\n"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn selftest_exit_zero() {
    let out = run(&["selftest"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn config_from_env() {
    let cfg = scratch("config.json");
    std::fs::write(&cfg, r#"{"format": "json", "limits": {"mis_vertices": 8}}"#).unwrap();
    let out = bin()
        .env("SARKOZY_CONFIG", &cfg)
        .args(["search", "--q", "2", "--F", "b^2", "--n", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1);
    let out = bin()
        .env("SARKOZY_CONFIG", &cfg)
        .args(["search", "--q", "2", "--F", "b^2", "--n", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    std::fs::write(&cfg, r#"{"limits": {"matrix_dim": 0}}"#).unwrap();
    let out = bin().env("SARKOZY_CONFIG", &cfg).args(["selftest"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_input_exit_codes() {
    assert_eq!(run(&["nosuch"]).status.code(), Some(1));
    assert_eq!(run(&["bound", "--q", "2"]).status.code(), Some(1));
    assert_eq!(run(&["phi", "--q", "2", "--F", "b^^2", "--n", "2"]).status.code(), Some(1));
    assert_eq!(run(&["phi", "--q", "2", "--F", "0,3", "--n", "2"]).status.code(), Some(1));
}
