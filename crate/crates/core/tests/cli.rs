use std::process::{Command, Output};

use serde_json::Value;

fn kacrice(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kacrice"))
        .args(args)
        .env_remove("KACRICE_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("kacrice-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn er_count_of_minima_per_unit_volume() {
    let out = kacrice(&["count", "--field", "exp1", "--N", "2", "--method", "er", "--volume", "1", "--k", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["subcommand"], "count");
    assert_eq!(v["config"]["budget"]["seed"], 0);
    let est = v["result"]["estimate"].as_f64().unwrap();
    let want = 1.0 / (3f64.sqrt() * std::f64::consts::PI);
    assert!((est - want).abs() < 1e-5, "{est}");
}

#[test]
fn f2_fails_assumption3() {
    let out = kacrice(&["check", "--field", "f2", "--N", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    let reports = v["reports"].as_array().unwrap();
    let a3 = reports.iter().find(|r| r["name"] == "assumption3").unwrap();
    assert_eq!(a3["status"], "fails");
}

#[test]
fn exp1_passes_every_default_check() {
    let out = kacrice(&["check", "--field", "exp1", "--N", "3"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn catalog_lists_the_examples() {
    let out = kacrice(&["catalog"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["fields"].as_array().unwrap().len() >= 6);
}

#[test]
fn usage_and_numeric_errors_have_distinct_codes() {
    assert_eq!(kacrice(&["count", "--N", "2"]).status.code(), Some(1));
    assert_eq!(kacrice(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(kacrice(&["count", "--field", "exp1", "--N", "2", "--method", "er", "--shell", "0.5,1.5", "--E", "0:inf"]).status.code(), Some(1));
    assert_eq!(kacrice(&["--help"]).status.code(), Some(0));
}

#[test]
fn emitted_configs_rerun_bit_identically() {
    let first = kacrice(&[
        "count", "--field", "exp-mix", "--N", "2", "--method", "shell-goi", "--shell", "0.5,1.5", "--E", "0:inf", "--k", "1",
    ]);
    assert_eq!(first.status.code(), Some(0));
    let path = scratch("count.json");
    std::fs::write(&path, &first.stdout).unwrap();
    let again = kacrice(&["count", "--request", path.to_str().unwrap()]);
    assert_eq!(json(&first)["result"], json(&again)["result"]);

    let sim = kacrice(&["simulate", "--field", "exp1", "--N", "2", "--shell", "0.5,1.5", "--reps", "20", "--seed", "7"]);
    assert_eq!(sim.status.code(), Some(0));
    let path = scratch("sim.json");
    std::fs::write(&path, &sim.stdout).unwrap();
    let again = kacrice(&["simulate", "--config", path.to_str().unwrap()]);
    assert_eq!(sim.stdout, again.stdout);
}

#[test]
fn environment_seed_is_recorded() {
    let out = Command::new(env!("CARGO_BIN_EXE_kacrice"))
        .args(["simulate", "--field", "exp1", "--N", "2", "--shell", "0.5,1.5", "--reps", "4"])
        .env("KACRICE_SEED", "13")
        .output()
        .unwrap();
    assert_eq!(json(&out)["config"]["seed"], 13);
}

#[test]
fn sweep_and_eigenvalue_csv() {
    let out = kacrice(&[
        "count", "--field", "exp1", "--N", "2", "--method", "shell-goi", "--shell", "0.5,1.5", "--sweep", "u0=-1..1:3", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "node,u0,estimate,std_error,quad_error,mc_samples,converged");
    assert_eq!(lines.len(), 4);
    let est: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!(est[0] >= est[1] && est[1] >= est[2], "{est:?}");

    let out = kacrice(&["rmt-sample", "--spec", r#"{"tag":"GOE","n":3}"#, "--count", "5", "--seed", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("sample,lambda_1,lambda_2,lambda_3"));
    assert_eq!(text.lines().count(), 6);
}
