use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nhspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nhspec")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn read_report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn lists_every_scenario() {
    let out = nhspec(&["--list-scenarios"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["core_suite", "path_suite", "coulomb_suite", "cannata_suite", "hatano_scan", "pt_suite"] {
        assert!(text.contains(name), "{name}");
    }
}

#[test]
fn passing_run_writes_report_and_spectra() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.cfg", "scenario = hatano_scan\nseed = 4\nsites = 24\nbc = periodic\ng_grid = 0, 0.5, 1\n");
    let out_dir = dir.path().join("out");
    let out = nhspec(&["run", &cfg, "--out", out_dir.to_str().unwrap(), "--csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = read_report(&out_dir);
    assert_eq!(v["pass"], true);
    assert_eq!(v["seed"], 4);
    assert!(out_dir.join("report.csv").exists());
    let spectra = std::fs::read_dir(&out_dir).unwrap().filter_map(|e| e.ok()).find(|e| e.file_name().to_string_lossy().starts_with("spectra"));
    assert!(spectra.is_some());
}

#[test]
fn seed_flag_overrides_and_supplies_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.cfg", "scenario = pt_suite\n");
    let out_dir = dir.path().join("o");
    assert_eq!(nhspec(&["run", &cfg, "--out", out_dir.to_str().unwrap()]).status.code(), Some(2));
    let out = nhspec(&["run", &cfg, "--out", out_dir.to_str().unwrap(), "--seed", "77"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(read_report(&out_dir)["seed"], 77);
}

#[test]
fn failing_check_exits_one_but_still_writes() {
    let dir = tempfile::tempdir().unwrap();
    // an absurdly tight tolerance forces a failure
    let cfg = write(dir.path(), "c.json", r#"{"scenario": "coulomb_suite", "tolerances": {"schrodinger_residual.rotated": 1e-300}}"#);
    let out_dir = dir.path().join("o");
    let out = nhspec(&["run", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_report(&out_dir);
    assert_eq!(v["pass"], false);
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL"));
}

#[test]
fn invalid_configs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("o");
    let o = out_dir.to_str().unwrap();
    for text in ["scenario = nope\n", "scenario = core_suite\nseed = 1\nbogus = 3\n", "not a config", "scenario = hatano_scan\nseed = 1\ndisorder = -1\n"] {
        let cfg = write(dir.path(), "bad.cfg", text);
        assert_eq!(nhspec(&["run", &cfg, "--out", o]).status.code(), Some(2), "{text}");
    }
    assert_eq!(nhspec(&["run", "/definitely/missing.cfg", "--out", o]).status.code(), Some(2));
    assert!(!out_dir.exists());
}

#[test]
fn unwritable_output_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.cfg", "scenario = coulomb_suite\n");
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let out = nhspec(&["run", &cfg, "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn output_dir_from_config_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from_cfg");
    let cfg = write(dir.path(), "c.cfg", &format!("scenario = coulomb_suite\noutput_dir = {}\n", target.display()));
    assert_eq!(nhspec(&["run", &cfg]).status.code(), Some(0));
    assert_eq!(read_report(&target)["scenario"], "coulomb_suite");
}
