use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sparse-risk"))
}

fn small_run(out: &Path) -> Command {
    let mut cmd = bin();
    cmd.args(["run", "--setup", "II", "--seed", "7", "--reps", "20", "--n-list", "60", "--gamma-points", "5"])
        .arg("--out")
        .arg(out);
    cmd
}

#[test]
fn unknown_setup_is_rejected() {
    let out = bin().args(["run", "--setup", "VII"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("VII"));
}

#[test]
fn nonpositive_reps_rejected() {
    let out = bin().args(["run", "--reps", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(small_run(&a).output().unwrap().status.success());
    assert!(small_run(&b).arg("--threads").arg("2").output().unwrap().status.success());
    let left = std::fs::read(a.join("setup_II.csv")).unwrap();
    assert_eq!(left, std::fs::read(b.join("setup_II.csv")).unwrap());
    let text = String::from_utf8(left).unwrap();
    assert!(text.starts_with("# sparse-risk "));
    assert!(text.lines().nth(1).unwrap().starts_with("setup,n,gamma,estimator,rel_median_me"));
    // Setup II has no figure
    assert!(!a.join("fig1_left.csv").exists());
}

#[test]
fn output_dir_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let env_dir = dir.path().join("env");
    let file_dir = dir.path().join("file");
    let cfg = dir.path().join("run.cfg");
    let base = ["oracle-check"];

    assert!(bin().args(base).env("SPARSE_RISK_OUT", &env_dir).output().unwrap().status.success());
    assert!(env_dir.join("oracle_check.csv").exists());

    std::fs::write(&cfg, format!("out = {}\n", file_dir.display())).unwrap();
    let status = bin().args(base).arg("--config").arg(&cfg).env("SPARSE_RISK_OUT", &env_dir).output().unwrap().status;
    assert!(status.success());
    assert!(file_dir.join("oracle_check.csv").exists());

    let flag_dir = dir.path().join("flag");
    let status = bin()
        .args(base)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&flag_dir)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(flag_dir.join("oracle_check.csv").exists());
}

#[test]
fn oracle_check_reports_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().arg("oracle-check").arg("--out").arg(dir.path()).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
}

#[test]
fn setup_i_writes_figure_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["setup", "I", "--reps", "10", "--n-list", "60", "--gamma-points", "3", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let left = std::fs::read_to_string(dir.path().join("fig1_left.csv")).unwrap();
    assert_eq!(left.lines().nth(1), Some("n,gamma,value,mc_se"));
    assert_eq!(left.lines().count(), 2 + 3);
    assert!(dir.path().join("fig1_right.csv").exists());
    assert!(String::from_utf8_lossy(&out.stdout).contains("worst-case"));
}

#[test]
fn hodges_and_lower_bound_commands() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["hodges", "--n", "100,400", "--reps", "50", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(dir.path().join("hodges.csv")).unwrap();
    assert_eq!(csv.lines().nth(1), Some("n,mu,risk,mc_se"));
    let status = bin()
        .args(["lower-bound", "--n-list", "60", "--reps", "20", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("lower_bound.csv").exists());
}
