use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_defeature"))
}

#[test]
fn list_prints_every_case() {
    let out = bin().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), defeature::catalog::list().len());
    assert!(text.contains("table2.twoholes"));
}

#[test]
fn case_writes_csv_and_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["case", "fig7.neg.corner", "--eps", "0.01", "--no-timing", "--dump-mesh", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("fig7.neg.corner.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.trim_end().ends_with(",0.0000000000000000e0"));
    let dump = std::fs::read_to_string(dir.path().join("fig7.neg.corner.0.exact.txt")).unwrap();
    assert!(dump.starts_with("mesh exact dim 2"));
    assert!(dump.contains("field u_d "));
    assert!(dir.path().join("fig7.neg.corner.0.defeatured.txt").exists());
}

#[test]
fn run_writes_configured_formats() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    let out_dir = dir.path().join("res");
    std::fs::write(
        &cfg,
        format!("[output]\ndir = {:?}\nformats = [\"csv\", \"json\"]\n\n[case.c]\ncatalog = \"fig7.neg.corner\"\neps = [0.01, 0.005]\n", out_dir),
    )
    .unwrap();
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("c.csv").exists());
    let json = std::fs::read_to_string(out_dir.join("c.json")).unwrap();
    let r = defeature::report::from_json(&json).unwrap();
    assert_eq!(r.cases.len(), 2);
}

#[test]
fn validation_failures_exit_with_2() {
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code();
    assert_eq!(code(&["case", "no.such.case"]), Some(2));
    assert_eq!(code(&["case", "fig7.neg.halfdisk", "--eps", "0.7"]), Some(2));
    assert_eq!(code(&["case", "fig7.neg.halfdisk", "--eps", "0.01", "--res", "1"]), Some(2));
    assert_eq!(code(&["run", "/nonexistent/config.toml"]), Some(2));
}

#[test]
fn solver_failures_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "[output]\ndir = \"unused\"\n[case.c]\ncatalog = \"fig7.neg.corner\"\neps = [0.01]\ndirect = false\nmax_iter = 2\n").unwrap();
    let out = bin().current_dir(dir.path()).arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
