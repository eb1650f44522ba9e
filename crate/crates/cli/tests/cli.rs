use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn kernelcomp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kernelcomp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run_to_file(config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    kernelcomp(&args)
}

#[test]
fn list_prints_every_command() {
    let out = kernelcomp(&["list"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    for name in [
        "hardy-bound",
        "theorem1",
        "szego-identity",
        "summation",
        "bergman-bound",
        "inf-estimate",
        "ball-lemma",
        "ball-bound",
        "br",
        "psd",
    ] {
        assert!(names.contains(&name), "{name}");
    }
}

#[test]
fn passing_run_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "psd.json", r#"{"name":"psd","seed":3}"#);
    let out = kernelcomp(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], Value::Bool(true));
    assert_eq!(v["records"][0]["paper_anchor"], "kernel-positivity");
}

#[test]
fn failed_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sharp.json",
        r#"{"name":"hardy-bound","params":{"degrees":[8,16]},"tolerances":{"sharpness":1e-12}}"#,
    );
    let out = run_to_file(&cfg, &dir.path().join("r.json"), &[]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(v["pass"], Value::Bool(false));
}

#[test]
fn errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_config(
        dir.path(),
        "a.json",
        r#"{"name":"summation","params":{"sectoin_degree":8}}"#,
    );
    assert_eq!(
        kernelcomp(&["run", "--config", unknown.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let bad_name = write_config(dir.path(), "b.json", r#"{"name":"nothing"}"#);
    assert_eq!(
        kernelcomp(&["run", "--config", bad_name.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let broken = write_config(dir.path(), "c.json", "{");
    assert_eq!(
        kernelcomp(&["run", "--config", broken.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let missing = dir.path().join("missing.json");
    assert_eq!(
        kernelcomp(&["run", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let not_self_map = write_config(
        dir.path(),
        "d.json",
        r#"{"name":"summation","params":{"symbol":{"poly":{"dim":1,"terms":[[[1],[1.5,0]]]}}}}"#,
    );
    assert_eq!(
        kernelcomp(&["run", "--config", not_self_map.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "t.json",
        r#"{"name":"theorem1","params":{"trials":10},"seed":11}"#,
    );
    for (format, ext) in [("json", "json"), ("csv", "csv")] {
        let a = dir.path().join(format!("a.{ext}"));
        let b = dir.path().join(format!("b.{ext}"));
        assert_eq!(
            run_to_file(&cfg, &a, &["--format", format]).status.code(),
            Some(0)
        );
        assert_eq!(
            run_to_file(&cfg, &b, &["--format", format]).status.code(),
            Some(0)
        );
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    }
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "t.json",
        r#"{"name":"theorem1","params":{"trials":3},"seed":1}"#,
    );
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    run_to_file(&cfg, &a, &[]);
    run_to_file(&cfg, &b, &["--seed", "2"]);
    let va: Value = serde_json::from_str(&fs::read_to_string(&a).unwrap()).unwrap();
    let vb: Value = serde_json::from_str(&fs::read_to_string(&b).unwrap()).unwrap();
    assert_eq!(va["config"]["seed"], 1);
    assert_eq!(vb["config"]["seed"], 2);
    assert_ne!(va["records"], vb["records"]);
}

#[test]
fn output_path_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from_config.json");
    let text = format!(
        r#"{{"name":"psd","output_path":{}}}"#,
        serde_json::to_string(target.to_str().unwrap()).unwrap()
    );
    let cfg = write_config(dir.path(), "p.json", &text);
    let out = kernelcomp(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(target.exists());
}

#[test]
fn hardy_bound_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "h.json",
        r#"{"name":"hardy-bound","params":{"degrees":[8,16,32]}}"#,
    );
    let out = kernelcomp(&["run", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,lower,upper"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn golden_summation_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.json",
        r#"{"name":"summation","params":{"symbol":{"poly":{"dim":1,"terms":[[[1],[1,0]]]}},"section_degree":4,"test_degree":2}}"#,
    );
    let out = dir.path().join("s.json.out");
    assert_eq!(run_to_file(&cfg, &out, &[]).status.code(), Some(0));
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/summation_identity.json");
    assert_eq!(
        fs::read_to_string(out).unwrap(),
        fs::read_to_string(golden).unwrap()
    );
}
