use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn univalent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_univalent")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn list_names_every_experiment() {
    let out = univalent(&["--list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["grunsky-vs-k", "coefficient-table", "l1-span-distance", "distortion-bound"] {
        assert!(text.contains(name), "{name} missing from\n{text}");
    }
}

#[test]
fn run_prints_csv_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"experiment": "coefficient-table", "params": {"n": "3..5"}}"#);
    let out = univalent(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("n,t,"));
}

#[test]
fn out_flag_writes_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "g.json",
        r#"{"experiment": "golusin-property", "params": {"maps": 50}, "format": "json"}"#,
    );
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = univalent(&["run", &cfg, "--seed", "7", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let first = fs::read(&a).unwrap();
    assert_eq!(first, fs::read(&b).unwrap());
    // one object per m ∈ {1, 2, 3}
    assert_eq!(String::from_utf8(first).unwrap().matches("\"m\":").count(), 3);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_config(dir.path(), "u.json", r#"{"experiment": "no-such-thing"}"#);
    assert_eq!(univalent(&["run", &unknown]).status.code(), Some(2));
    let bad_param = write_config(dir.path(), "p.json", r#"{"experiment": "kappa-n-table", "params": {"q": 1}}"#);
    assert_eq!(univalent(&["run", &bad_param]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(univalent(&["run", missing.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(univalent(&[]).status.code(), Some(2));
}

#[test]
fn uncertified_distance_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "l.json",
        r#"{"experiment": "l1-span-distance", "params": {"n_r": 12, "n_theta": 24, "restarts": 2, "tolerance": 1e-300}}"#,
    );
    let out = univalent(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!out.stdout.is_empty());
}
