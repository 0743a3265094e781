use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SMALL: &str = r#"
seed = 3
theta0 = [0.3]
n_list = [40, 80]
replications = 2
resolution = 9

[system]
family = "flip2"
box = [[0.05, 0.95]]

[observation]
kind = "gaussian"
means = [0.0, 1.0]
std = 0.5
"#;

fn dynmle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynmle")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn run_dir(out: &Output) -> PathBuf {
    PathBuf::from(String::from_utf8(out.stdout.clone()).unwrap().trim())
}

#[test]
fn simulate_then_mle_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL);
    let runs = dir.path().join("runs");
    let runs = runs.to_str().unwrap();
    let sim = dynmle(&["simulate", "--config", &cfg, "--out", runs]);
    assert_eq!(sim.status.code(), Some(0), "{}", String::from_utf8_lossy(&sim.stderr));
    let data = run_dir(&sim).join("observations_n80.txt");
    let mle = dynmle(&["mle", "--config", &cfg, "--out", runs, "--data", data.to_str().unwrap()]);
    assert_eq!(mle.status.code(), Some(0), "{}", String::from_utf8_lossy(&mle.stderr));
    let est: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(run_dir(&mle).join("estimate.json")).unwrap()).unwrap();
    let t = est["theta_hat"][0].as_f64().unwrap();
    assert!((0.05..=0.95).contains(&t));
}

#[test]
fn seed_flag_changes_data_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL);
    let out = dir.path().to_str().unwrap();
    let a = run_dir(&dynmle(&["simulate", "--config", &cfg, "--out", out, "--seed", "1"]));
    let b = run_dir(&dynmle(&["simulate", "--config", &cfg, "--out", out, "--seed", "2"]));
    let read = |d: &Path| std::fs::read(d.join("observations_n40.txt")).unwrap();
    assert_ne!(read(&a), read(&b));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(b.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 2);
}

#[test]
fn invalid_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", &SMALL.replace("std = 0.5", "sd = 0.5"));
    let out = dynmle(&["simulate", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("sd") && err.contains("line"), "{err}");

    let missing = dynmle(&["simulate", "--config", "/nonexistent/c.toml"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn corrupted_data_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL);
    let data = write(dir.path(), "y.txt", "# model=flip2/gaussian theta0=0.3 seed=1 n=3\n0.1\n0.2\nabc\n0.4\n");
    let out = dynmle(&["mle", "--config", &cfg, "--out", dir.path().to_str().unwrap(), "--data", &data]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 4"));

    let short = write(dir.path(), "short.txt", "# model=flip2/gaussian theta0=0.3 seed=1 n=3\n0.1\n");
    let out = dynmle(&["mle", "--config", &cfg, "--out", dir.path().to_str().unwrap(), "--data", &short]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_condition_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/period2.toml");
    let out = dynmle(&[
        "verify-conditions",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(run_dir(&out).join("conditions.json")).unwrap()).unwrap();
    let s5 = report["entries"].as_array().unwrap().iter().find(|e| e["id"] == "S5").unwrap();
    assert_eq!(s5["status"], "fail");
}

#[test]
fn zero_threads_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL);
    let out = dynmle(&["simulate", "--config", &cfg, "--threads", "0"]);
    assert_eq!(out.status.code(), Some(2));
}
