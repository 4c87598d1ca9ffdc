use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn modelbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modelbench"))
        .args(args)
        .env_remove("MODELBENCH_OUT")
        .output()
        .unwrap()
}

fn profile(language: &str) -> String {
    fixtures().join("profiles").join(format!("{language}.json")).display().to_string()
}

#[test]
fn run_writes_all_six_artifact_kinds() {
    let out = tempfile::tempdir().unwrap();
    let o = modelbench(&["run", "--profile", &profile("archimate"), "--out", out.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["dataset_info.json", "ir_info.json", "measures.json", "measures_per_model.json", "report.json"] {
        assert!(out.path().join(name).is_file(), "{name}");
    }
    assert!(std::fs::read_dir(out.path().join("ir")).unwrap().count() >= 5);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("parse: 6 models, 2 success, 3 partial, 1 failed"), "{stdout}");
}

#[test]
fn measure_before_parse_names_ir_info() {
    let out = tempfile::tempdir().unwrap();
    let o = modelbench(&["measure", "--profile", &profile("ecore"), "--out", out.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ir_info.json"));
}

#[test]
fn missing_profile_is_a_stage_error() {
    let o = modelbench(&["scan", "--profile", "/nonexistent/missing.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("file not found"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(modelbench(&["scan"]).status.code(), Some(2));
    assert_eq!(modelbench(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn environment_output_is_used_without_flag() {
    let out = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_modelbench"))
        .args(["scan", "--profile", &profile("ecore")])
        .env("MODELBENCH_OUT", out.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.path().join("dataset_info.json").is_file());
}
