use std::path::Path;
use std::process::{Command, Output};

fn singleshot(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_singleshot")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const SWEEP: &str = r#"
task = "sweep"
seed = 4
codes = [{ family = "toric2d", size = 3 }]

[sweep]
noise = { kind = "iid_local" }
flips = { kind = "iid" }
lambda = [0.02, 0.04]
eta = [0.02]
rounds = [5]
trials = 200

[output]
csv = "out/rows.csv"
trajectories = "out/traj.jsonl"
"#;

#[test]
fn code_build_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = singleshot(&["code", "build", "--family", "toric3d_z", "--size", "2", "--out", "c.json"], dir.path());
    assert!(o.status.success(), "{o:?}");
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("c.json")).unwrap()).unwrap();
    assert_eq!(v["n"], 24);
}

#[test]
fn verify_all_passes_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = singleshot(&["verify", "all", "--report", "r.json", "--seed", "3"], dir.path());
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), text.lines().count());
}

#[test]
fn run_writes_csv_and_dumps_that_replay() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("sweep.toml"), SWEEP).unwrap();
    let o = singleshot(&["run", "sweep.toml", "--workers", "3"], dir.path());
    assert!(o.status.success(), "{o:?}");
    let csv = std::fs::read_to_string(dir.path().join("out/rows.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "family,L,lambda,eta,n,trials,fail_mean,fail_lo,fail_hi,seed");
    assert_eq!(lines.count(), 2);

    for k in 0..2 {
        let dump = format!("out/traj.{k}.jsonl");
        let same = singleshot(&["replay", &dump, "--workers", "2"], dir.path());
        assert!(same.status.success(), "{}", stdout(&same));
        assert!(stdout(&same).starts_with("identical: 200 trials"));
    }
    let other = singleshot(&["replay", "out/traj.0.jsonl", "--seed", "5"], dir.path());
    assert_eq!(other.status.code(), Some(1));
    assert!(stdout(&other).starts_with("mismatch"));
}

#[test]
fn memory_sweep_to_stdout_matches_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SWEEP.split("[output]").next().unwrap();
    std::fs::write(dir.path().join("plain.toml"), cfg).unwrap();
    let a = singleshot(&["memory", "sweep", "plain.toml", "--workers", "1"], dir.path());
    let b = singleshot(&["memory", "sweep", "plain.toml", "--out", "b.csv", "--workers", "4"], dir.path());
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a), std::fs::read_to_string(dir.path().join("b.csv")).unwrap());
}

#[test]
fn schema_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), SWEEP.replace("trials = 200", "trails = 200")).unwrap();
    let o = singleshot(&["run", "bad.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.toml") && err.contains("trails"), "{err}");
}

#[test]
fn unknown_verb_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(singleshot(&["transmogrify"], dir.path()).status.code(), Some(2));
    assert_eq!(singleshot(&["--version"], dir.path()).status.code(), Some(0));
}
