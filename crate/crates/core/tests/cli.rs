use std::path::Path;
use std::process::{Command, Output};

fn crucispec(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crucispec"))
        .args(args)
        .env("CRUCISPEC_CACHE", cache)
        .output()
        .expect("spawn crucispec")
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file() && p.file_name().unwrap() != "timings.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "kind = \"rhombus\"\nwidht = 3\n").unwrap();
    let out = crucispec(&["section", "--config", cfg.to_str().unwrap(), "--dry-run"], tmp.path());
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn invalid_profile_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = crucispec(&["section", "--kind", "triangle"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dry_run_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("out");
    let out = crucispec(&["solve3d", "--out", dir.to_str().unwrap(), "--dry-run"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let plan: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(plan.is_object());
    assert!(!dir.exists());
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let dir = tmp.path().join(name);
        let out = crucispec(
            &["section", "--kind", "rhombus", "--H", "25,50", "--threads", threads, "--out", dir.to_str().unwrap()],
            tmp.path(),
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        read_all(&dir)
    };
    let a = run("a", "1");
    let b = run("b", "4");
    assert!(a.iter().any(|(n, _)| n == "manifest.json"));
    assert!(a.iter().any(|(n, _)| n == "threshold_sweep.csv"));
    assert_eq!(a, b);
}

#[test]
fn report_verifies_and_emits_plot_data() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("out");
    let d = dir.to_str().unwrap();
    let out = crucispec(&["modes", "--kind", "ellipse", "--lambda", "6.5", "--out", d], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("modes.csv")).unwrap();
    assert!(csv.starts_with("# manifest=manifest.json config_hash="));

    let out = crucispec(&["report", "--out", d], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("plot").read_dir().unwrap().next().is_some());

    // Tampering with an artifact is caught.
    std::fs::write(dir.join("modes.csv"), "tampered\n").unwrap();
    let out = crucispec(&["report", "--out", d], tmp.path());
    assert_eq!(out.status.code(), Some(5));
}
