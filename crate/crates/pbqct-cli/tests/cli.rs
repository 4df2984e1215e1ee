//! End-to-end tests of the `pbqct` binary: output schemas, determinism,
//! and the exit-code contract (0 ok, 2 usage, 3 capacity, 4 numerical).

use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn pbqct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pbqct"))
        .args(args)
        .env_remove("PBQCT_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("pbqct-cli-test-{}-{}", std::process::id(), name));
    p
}

#[test]
fn fidelity_pbt_closed_form() {
    let out = pbqct(&["fidelity", "--family", "pbt", "--d", "2", "--n", "1"]);
    let v = stdout_json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["method"], "closedform");
    assert!((v["F"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!((v["f"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn fidelity_parallel_st_defaults_to_closed_form() {
    let out = pbqct(&[
        "fidelity",
        "--family",
        "parallel-st",
        "--d",
        "2",
        "--n",
        "3",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["F"].as_f64().unwrap(), 1.0);
}

#[test]
fn fidelity_gen_pbqct2_qutrit() {
    let out = pbqct(&["fidelity", "--family", "gen-pbqct2", "--d", "3", "--n", "1"]);
    let v = stdout_json(&out);
    assert!((v["F"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    assert_eq!(v["set"], "0.0+0.1+0.2");
}

#[test]
fn fidelity_custom_pairs_brute_force() {
    let out = pbqct(&[
        "fidelity", "--family", "custom", "--pairs", "0,0;1,1", "--d", "2", "--n", "2",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["method"], "bruteforce");
    // Any two-label qubit set shares the PBQCT-2 fidelity.
    let expected = 0.7285533905932737;
    assert!((v["F"].as_f64().unwrap() - expected).abs() < 1e-9);
}

#[test]
fn usage_errors_exit_2() {
    let out = pbqct(&["fidelity", "--family", "pbqct2", "--d", "3", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = pbqct(&["fidelity", "--family", "custom", "--d", "2", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn capacity_errors_exit_3() {
    let out = pbqct(&[
        "fidelity",
        "--family",
        "pbt",
        "--d",
        "2",
        "--n",
        "40",
        "--method",
        "bruteforce",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_reproduces_three_family_grid() {
    let path = temp_path("fig3a.csv");
    let path_str = path.to_str().unwrap();
    let args = [
        "sweep",
        "--d",
        "2",
        "--n",
        "1..10",
        "--family",
        "pbt",
        "--family",
        "pbqct2",
        "--family",
        "pbqct3",
        "--method",
        "closedform",
        "--out",
        path_str,
    ];
    let out = pbqct(&args);
    assert!(out.status.success());
    let first = std::fs::read(&path).unwrap();
    let text = String::from_utf8(first.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("d,n,set,method,F,f"));
    assert_eq!(lines.count(), 30);
    // Rerun is byte-identical.
    let out = pbqct(&args);
    assert!(out.status.success());
    let second = std::fs::read(&path).unwrap();
    assert_eq!(first, second);
    let _ = std::fs::remove_file(&path);
}

#[test]
fn sweep_inv_gap_column() {
    let path = temp_path("fig4.csv");
    let out = pbqct(&[
        "sweep",
        "--d",
        "2",
        "--d",
        "3",
        "--n",
        "2..4",
        "--family",
        "gen-pbqct2",
        "--method",
        "closedform",
        "--transform",
        "inv-gap",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("d,n,set,method,F,f,inv_gap"));
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 7);
        let f: f64 = cols[4].parse().unwrap();
        let inv: f64 = cols[6].parse().unwrap();
        assert!((inv - 1.0 / (1.0 - f)).abs() < 1e-9 * inv.abs());
    }
    let _ = std::fs::remove_file(&path);
}

#[test]
fn sweep_subset_mode_and_error_sidecar() {
    let path = temp_path("mixed.csv");
    // pbqct2 at d=3 fails per point; the subset rows succeed.
    let out = pbqct(&[
        "sweep",
        "--d",
        "3",
        "--n",
        "1",
        "--family",
        "pbqct2",
        "--subset-size",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "partial failure should still exit 0");
    let text = std::fs::read_to_string(&path).unwrap();
    // C(9,2) = 36 subset rows.
    assert_eq!(text.lines().count(), 1 + 36);
    let mut err_path = path.clone();
    err_path.set_extension("errors");
    let sidecar = std::fs::read_to_string(&err_path).unwrap();
    assert_eq!(sidecar.lines().count(), 1);
    let _ = std::fs::remove_file(&path);
    let _ = std::fs::remove_file(&err_path);
}

#[test]
fn sweep_out_dir_env_resolution() {
    let dir = temp_path("outdir");
    std::fs::create_dir_all(&dir).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_pbqct"))
        .args([
            "sweep",
            "--d",
            "2",
            "--n",
            "1",
            "--family",
            "pbt",
            "--method",
            "closedform",
            "--out",
            "nested/run.csv",
        ])
        .env("PBQCT_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.join("nested/run.csv").exists());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn sweep_monte_carlo_rows_are_reproducible() {
    let a = temp_path("mc-a.csv");
    let b = temp_path("mc-b.csv");
    let run = |path: &PathBuf, jobs: &str| {
        let out = pbqct(&[
            "sweep",
            "--d",
            "2",
            "--n",
            "1..3",
            "--family",
            "pbt",
            "--family",
            "pbqct2",
            "--method",
            "montecarlo",
            "--samples",
            "2000",
            "--seed",
            "5",
            "--jobs",
            jobs,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    };
    // Same seed, different worker counts: identical bytes.
    run(&a, "1");
    run(&b, "4");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let _ = std::fs::remove_file(&a);
    let _ = std::fs::remove_file(&b);
}

#[test]
fn classify_qubit_pairs_single_class() {
    let out = pbqct(&["classify", "--d", "2", "--n", "3", "--k", "2"]);
    let v = stdout_json(&out);
    let classes = v["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 1);
    assert_eq!(classes[0]["size"], 6);
    assert!(classes[0]["spread"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn simulate_parallel_st_returns_input() {
    let out = pbqct(&[
        "simulate",
        "--family",
        "parallel-st",
        "--d",
        "2",
        "--n",
        "1",
        "--state",
        "plus",
    ]);
    let v = stdout_json(&out);
    let rho = v["rho_out"].as_array().unwrap();
    assert_eq!(rho.len(), 2);
    for row in rho {
        for entry in row.as_array().unwrap() {
            let entry = entry.as_array().unwrap();
            assert!((entry[0].as_f64().unwrap() - 0.5).abs() < 1e-10);
            assert!(entry[1].as_f64().unwrap().abs() < 1e-10);
        }
    }
    let total: f64 = v["weights"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w["weight"].as_f64().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-10);
}

#[test]
fn distance_report() {
    let out = pbqct(&["distance", "--d", "2", "--n", "1", "--p", "2"]);
    let v = stdout_json(&out);
    assert!((v["minimum"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["alpha_star"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let gap = (v["numeric_check"].as_f64().unwrap() - v["minimum"].as_f64().unwrap()).abs();
    assert!(gap <= 1e-9);
}
