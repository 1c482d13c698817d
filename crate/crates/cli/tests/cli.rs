use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracsys"))
        .args(args)
        .arg("--output")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn constants_writes_reports_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["constants", "--sweep"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let json = fs::read_to_string(dir.path().join("constants.json")).unwrap();
    assert!(json.contains("\"S_scalar\"") && json.contains("\"config.alpha\""));
    let sweep = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 51);
}

#[test]
fn same_config_and_seed_give_identical_bytes() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [a.path(), b.path()] {
        assert_eq!(code(&run(dir, &["solve", "--restarts", "1", "--seed", "11"])), 0);
        assert_eq!(code(&run(dir, &["verify", "--seed", "11"])), 0);
    }
    for name in ["solve.json", "trace.csv", "u_bar.csv", "v_bar.csv", "verify.csv", "verify.json"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name} differs"
        );
    }
}

#[test]
fn alpha_at_most_one_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["solve", "--alpha", "1.0"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("alpha must be > 1"), "{}", stderr(&o));
}

#[test]
fn bad_config_files_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "grid_size = 100\n").unwrap();
    let o = run(dir.path(), &["constants", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("power of two"));
    fs::write(&cfg, "unknown_key = 1\n").unwrap();
    assert_eq!(code(&run(dir.path(), &["constants", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn regime_mismatches_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(dir.path(), &["bubble"])), 2);
    assert_eq!(code(&run(dir.path(), &["ground-state", "--gamma", "0"])), 2);
}

#[test]
fn injected_operator_fault_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify", "--inject-fault", "multiplier"]);
    assert_eq!(code(&o), 1);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("FAIL multiplier exactness"), "{stdout}");
}

#[test]
fn unconverged_solve_exits_with_one_and_keeps_its_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "[solve]\nmax_iter = 1\n").unwrap();
    let o = run(dir.path(), &["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let json = fs::read_to_string(dir.path().join("solve.json")).unwrap();
    assert!(json.contains("\"converged\": false"), "{json}");
}

#[test]
fn bubble_and_ground_state_write_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["bubble", "--gamma", "0"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let meta = fs::read_to_string(dir.path().join("bubble.meta")).unwrap();
    assert!(meta.contains("decay_exponent = "));
    let o = run(dir.path(), &["ground-state", "--alpha", "1.5", "--beta", "1.5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(dir.path().join("ground_state.csv").exists());
}

#[test]
fn shipped_example_config_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/example.toml");
    let o = run(dir.path(), &["solve", "--config", cfg]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let json = fs::read_to_string(dir.path().join("solve.json")).unwrap();
    assert!(json.contains("\"restart_spread\"") && json.contains("\"config.forcing.g.kind\": \"indicator\""));
}
