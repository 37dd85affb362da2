use nhspec::report::{emit_report, run_scenario, ReportError, ReportFormat, Scenario, ScenarioConfig};
use serde_json::Value;

#[test]
fn report_json_has_the_documented_shape() {
    let cfg = ScenarioConfig::parse("scenario = pt_suite\nseed = 9\n").unwrap();
    let out = run_scenario(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = out.write_to(dir.path()).unwrap();
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&files[0]).unwrap()).unwrap();
    let obj = v.as_object().unwrap();
    let mut keys: Vec<_> = obj.keys().cloned().collect();
    keys.sort();
    assert_eq!(keys, ["checks", "params", "pass", "scenario", "seed", "version"]);
    assert_eq!(v["scenario"], "pt_suite");
    assert_eq!(v["seed"], 9);
    for c in v["checks"].as_array().unwrap() {
        let mut k: Vec<_> = c.as_object().unwrap().keys().cloned().collect();
        k.sort();
        assert_eq!(k, ["name", "paper_anchor", "pass", "tol", "value"]);
        assert!(!c["paper_anchor"].as_str().unwrap().is_empty());
    }
    assert_eq!(v["pass"], true);
}

#[test]
fn reruns_are_byte_identical() {
    let cfg = ScenarioConfig::parse("scenario = hatano_scan\nseed = 5\nsites = 32\nbc = periodic\ng_grid = 0, 0.5, 1\n").unwrap();
    let a = run_scenario(&cfg).unwrap();
    let b = run_scenario(&cfg).unwrap();
    assert_eq!(a.side_files, b.side_files);
    assert!(a.side_files[0].1.starts_with("g,index,re_e,im_e\n"));
    assert_eq!(a.report.checks.len(), b.report.checks.len());
}

#[test]
fn open_scan_reports_the_infinite_sentinel() {
    let cfg = ScenarioConfig::parse("scenario = hatano_scan\nseed = 1\nsites = 64\nbc = open\ng_grid = 0, 0.25, 0.5, 0.75, 1\n").unwrap();
    let out = run_scenario(&cfg).unwrap();
    let v: Value = serde_json::from_str(&out.report.to_json()).unwrap();
    let gc = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "critical_g_scan.g_c").unwrap();
    assert_eq!(gc["value"], "inf");
    assert!(out.report.pass);
}

#[test]
fn every_scenario_without_seed_needs_one_when_random() {
    for sc in Scenario::ALL {
        let r = ScenarioConfig::new(sc).validate();
        assert_eq!(r.is_err(), sc.randomized(), "{sc}");
    }
    assert!(matches!(ScenarioConfig::parse("scenario = hatano_scan\nsites = 64\n"), Err(ReportError::Config(_))));
}

#[test]
fn unwritable_destination_is_an_io_error() {
    let out = run_scenario(&ScenarioConfig::new(Scenario::CoreSuite).with_seed(1)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    assert!(matches!(out.write_to(&blocker.join("sub")), Err(ReportError::Io { .. })));
    assert!(matches!(emit_report(&out.report, ReportFormat::Csv, &blocker.join("r.csv")), Err(ReportError::Io { .. })));
}
