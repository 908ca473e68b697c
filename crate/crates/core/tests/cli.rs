use std::path::Path;
use std::process::Command;

fn degenera(args: &[&str], env: &[(&str, &str)]) -> (Option<i32>, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_degenera"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().unwrap();
    (out.status.code(), String::from_utf8_lossy(&out.stdout).into_owned(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name).display().to_string()
}

#[test]
fn passing_run_writes_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, stdout, _) = degenera(&["verify", "--config", &config("verify.toml"), "--out", out], &[]);
    assert_eq!(code, Some(0), "{stdout}");
    assert!(stdout.contains("verdict: pass"));
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert_eq!(report, stdout);
    let csv = std::fs::read_to_string(dir.path().join("verify.csv")).unwrap();
    assert!(csv.starts_with("kind,alpha,residual,scale,relative,holds\n"));
    // no temporary files left behind
    assert!(std::fs::read_dir(dir.path()).unwrap().all(|e| !e.unwrap().file_name().to_string_lossy().ends_with(".tmp")));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, stdout, _) = degenera(&["inequality", "--config", &config("oned.toml"), "--out", out, "--seed", "99"], &[]);
    assert_eq!(code, Some(0));
    assert!(stdout.contains("seed: 99"));
}

#[test]
fn schema_violation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "command = \"poincare\"\n[poincare]\ncells = [8]\nbogus = 1\n").unwrap();
    let (code, _, stderr) =
        degenera(&["poincare", "--config", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(code, Some(1));
    assert!(stderr.contains("bogus"), "{stderr}");
}

#[test]
fn mismatched_command_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, stderr) =
        degenera(&["density", "--config", &config("poincare.toml"), "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(code, Some(1));
    assert!(stderr.contains("poincare"));
}

#[test]
fn missing_config_exits_one() {
    let (code, _, _) = degenera(&["verify", "--config", "/nonexistent/x.toml"], &[]);
    assert_eq!(code, Some(1));
}

#[test]
fn invalid_thread_count_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, _, stderr) =
        degenera(&["poincare", "--config", &config("poincare.toml"), "--out", out], &[("DEGENERA_THREADS", "zero")]);
    assert_eq!(code, Some(1));
    assert!(stderr.contains("DEGENERA_THREADS"));
    let (code, _, _) = degenera(&["poincare", "--config", &config("poincare.toml"), "--out", out], &[("DEGENERA_THREADS", "2")]);
    assert_eq!(code, Some(0));
}

#[test]
fn failed_hypothesis_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, _) =
        degenera(&["inequality", "--config", &config("kebiche_window.toml"), "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(code, Some(2));
    assert!(stdout.contains("FAIL hypothesis: dimension window"));
}
