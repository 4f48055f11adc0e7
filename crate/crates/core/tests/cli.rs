//! End-to-end runs of the `slantsub` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use slantsub::cli::{Report, EXIT_CONFIG, EXIT_EVAL, EXIT_FAIL, EXIT_PASS};

fn slantsub(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slantsub")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn config_file(name: &str, text: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn json_report_round_trips() {
    let o = slantsub(&["verify", "--fixture", "psi2", "--samples", "5", "--format", "json"]);
    assert_eq!(code(&o), EXIT_PASS);
    let text = stdout(&o);
    let report = Report::from_json(&text).unwrap();
    assert_eq!(report.to_json(), text);
    assert_eq!(report.samples, 5);
    assert!(report.pass);
    assert!(report.wall_time_seconds.is_none());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["verify", "--fixture", "hopf", "--samples", "6", "--seed", "0x2a", "--format", "json"];
    assert_eq!(slantsub(&args).stdout, slantsub(&args).stdout);
}

#[test]
fn timing_is_opt_in() {
    let o = slantsub(&["analyze", "--fixture", "psi2", "--samples", "3", "--format", "json", "--timing"]);
    let report = Report::from_json(&stdout(&o)).unwrap();
    assert!(report.wall_time_seconds.is_some());
}

#[test]
fn failing_checks_exit_with_one() {
    let o = slantsub(&["verify", "--fixture", "psi2_squared", "--samples", "5"]);
    assert_eq!(code(&o), EXIT_FAIL);
    let text = stdout(&o);
    assert!(text.contains("thm-homothety"));
    assert!(text.trim_end().ends_with("result: FAIL"), "{text}");
}

#[test]
fn check_subset_and_parameters() {
    let o = slantsub(&[
        "verify", "--fixture", "psi1", "--param", "pairing=cross", "--param", "alpha=0.3", "--checks",
        "thm-D2,slant-angle", "--samples", "4", "--format", "json",
    ]);
    assert_eq!(code(&o), EXIT_PASS);
    let report = Report::from_json(&stdout(&o)).unwrap();
    let ids: Vec<&str> = report.checks.iter().map(|c| c.check_id.as_str()).collect();
    assert_eq!(ids, ["slant-angle", "thm-D2"]);
    assert_eq!(report.pairing.as_deref(), Some("cross"));
    let expected = (0.3 + std::f64::consts::FRAC_PI_6).cos().abs();
    assert!((report.slant.cos_mean - expected).abs() < 1e-10);
}

#[test]
fn configuration_errors_exit_with_two() {
    for args in [
        vec!["verify", "--fixture", "psi9"],
        vec!["verify", "--fixture", "psi2", "--param", "alpha=1"],
        vec!["verify", "--fixture", "psi2", "--checks", "thm-nope"],
        vec!["verify", "--fixture", "psi2", "--samples", "0"],
        vec!["verify"],
    ] {
        let o = slantsub(&args);
        assert_eq!(code(&o), EXIT_CONFIG, "{args:?}");
        assert!(o.stdout.is_empty());
        assert!(String::from_utf8_lossy(&o.stderr).contains("configuration error"), "{args:?}");
    }
    let path = config_file("bad_key.json", r#"{"fixture": "psi2", "run": {"sample": 3}}"#);
    let o = slantsub(&["verify", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&o), EXIT_CONFIG);
    assert!(String::from_utf8_lossy(&o.stderr).contains("run"));
}

#[test]
fn inline_config_runs() {
    let path = config_file(
        "inline.json",
        r#"{
            "source": "cosym_r5",
            "target": {"dimension": 2},
            "map": {"components": ["3*(x1 - x2)/sqrt(2)", "3*x4"]},
            "run": {"samples": 4, "checks": ["slant-angle", "thm-D2"]}
        }"#,
    );
    let o = slantsub(&["analyze", "--config", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&o), EXIT_PASS, "{}", String::from_utf8_lossy(&o.stderr));
    let report = Report::from_json(&stdout(&o)).unwrap();
    assert!((report.slant.mean - std::f64::consts::FRAC_PI_4).abs() < 1e-10);
    assert!((report.conformality.dilation_max - 3.0).abs() < 1e-10);
}

#[test]
fn critical_points_exit_with_three() {
    let path = config_file(
        "constant.json",
        r#"{
            "source": "cosym_r5",
            "target": {"dimension": 2},
            "map": {"components": ["1", "2"]}
        }"#,
    );
    let o = slantsub(&["verify", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&o), EXIT_EVAL, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("evaluation error"));
}

#[test]
fn listings() {
    let o = slantsub(&["list-fixtures"]);
    assert_eq!(code(&o), EXIT_PASS);
    for name in ["psi1", "psi2", "psi3", "psi2_squared", "psi3_inverted", "hopf"] {
        assert!(stdout(&o).contains(name));
    }
    let o = slantsub(&["list-checks"]);
    assert_eq!(code(&o), EXIT_PASS);
    assert_eq!(stdout(&o).lines().count(), 15);
    assert!(stdout(&o).contains("thm-local-product"));
}
