use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn gamow(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gamow"))
        .args(args)
        .current_dir(cwd)
        .env_remove("GAMOW_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p.to_str().unwrap().to_string()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn uncoupled_pole_is_the_bare_level() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &json!({
            "model": {"omega_0": 1.5, "lambda": 0.0, "form_factor": {"kind": "rational", "scale": 1.0}},
            "tasks": ["find_pole"]
        }),
    );
    let out = gamow(&["run", &cfg, "--out", "o"], dir.path());
    assert!(out.status.success());
    let poles = read_json(&dir.path().join("o/poles.json"));
    let p = &poles["poles"][0];
    assert_eq!(p["e_r"].as_f64(), Some(1.5));
    assert_eq!(p["gamma"].as_f64(), Some(0.0));
    assert!(p["argument_principle_count"].is_null());
    assert!(dir.path().join("o/schema.json").exists());
}

#[test]
fn poisson_echo_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &json!({
            "spectrum": {"ladder": {"e_r": 1.0, "gamma": 0.2}},
            "initial_state": {"quasi_coherent": {"alpha": 2.0, "n_max": 120}},
            "time_grid": {"t_start": 0.0, "t_end": 2.0, "samples": 3},
            "tasks": ["echo"]
        }),
    );
    assert!(gamow(&["run", &cfg, "--out", "o"], dir.path())
        .status
        .success());
    let text = fs::read_to_string(dir.path().join("o/echo.csv")).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&header[..4], ["tau", "amplitude", "probability", "mode_0"]);
    assert_eq!(header.len(), 3 + 121);
    let row: Vec<f64> = lines
        .nth(1)
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(row[0], 1.0);
    assert!((row[1] - 0.4843).abs() < 5e-5);
    assert!((row[2] - row[1] * row[1]).abs() < 1e-16);

    let schema = read_json(&dir.path().join("o/schema.json"));
    let cols = schema["files"]["echo.csv"]["columns"].as_array().unwrap();
    assert_eq!(cols.len(), header.len());
}

#[test]
fn empty_task_list_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &json!({"tasks": []}));
    let out = gamow(&["run", &cfg, "--out", "o"], dir.path());
    assert!(out.status.success());
    assert!(!dir.path().join("o").exists());
}

#[test]
fn invalid_config_reports_every_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &json!({
            "spectrum": {"explicit": [{"e_r": 1.0, "gamma": -0.5}], "ladder": {"e_r": 1.0, "gamma": 0.1}},
            "time_grid": {"t_start": 0.0, "t_end": 1.0, "samples": 1},
            "tasks": ["echo"]
        }),
    );
    let out = gamow(&["run", &cfg, "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stderr).unwrap();
    let errors = report["errors"].as_array().unwrap();
    assert!(errors.len() >= 3, "{errors:?}");
    let msg = errors.iter().find(|e| e["path"] == "spectrum").unwrap()["message"]
        .as_str()
        .unwrap();
    assert!(msg.contains("explicit") && msg.contains("ladder"));
    assert!(!dir.path().join("o").exists());
}

#[test]
fn malformed_json_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.json"), "{ not json").unwrap();
    let out = gamow(&["run", "c.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let missing = gamow(&["run", "absent.json"], dir.path());
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn solver_failure_keeps_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &json!({
            "model": {"omega_0": 1.0, "lambda": 0.2, "max_iterations": 0, "tolerance": 1e-15,
                      "form_factor": {"kind": "rational", "scale": 1.0}},
            "spectrum": {"ladder": {"e_r": 1.0, "gamma": 0.2}},
            "initial_state": {"quasi_coherent": {"alpha": 1.0, "n_max": 10}},
            "time_grid": {"t_start": 0.0, "t_end": 1.0, "samples": 5},
            "tasks": ["echo", "find_pole"]
        }),
    );
    let out = gamow(&["run", &cfg, "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    // find_pole runs first and fails before echo
    let err = read_json(&dir.path().join("o/error.json"));
    assert_eq!(err["task"], "find_pole");
    assert!(!dir.path().join("o/poles.json").exists());
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_gamow"))
        .args(["run", "--seed-examples"])
        .current_dir(dir.path())
        .env("GAMOW_OUT_DIR", "seeded")
        .output()
        .unwrap();
    assert!(out.status.success());
    for name in ["lambda_sweep.json", "poisson_echo.json", "decoherence.json"] {
        assert!(dir.path().join("seeded").join(name).exists());
    }
}

#[test]
fn no_config_without_seeding_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(gamow(&["run"], dir.path()).status.code(), Some(1));
}
