use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_pr-markov"));
    c.env_remove("PR_MARKOV_WORKERS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn pr-markov")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pr-markov-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("cfg.toml");
    std::fs::write(&p, body).unwrap();
    p
}

const TRAJECTORY: &str = r#"
experiment = "trajectory"
topologies = ["open", "star"]
n = [4]
c = [0.0, 0.3333333333333333]
iterations = 6
"#;

#[test]
fn presets_list() {
    let o = run(&["presets", "list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("gap-vs-c"));
    assert!(text.lines().count() >= 10);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["run", "--preset", "no-such-preset"]).status.code(), Some(2));
    assert_eq!(run(&["run", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let o = bin().env("PR_MARKOV_WORKERS", "0").args(["presets", "list"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));

    let dir = scratch("usage");
    let cfg = write_config(&dir, "experiment = \"trajectory\"\nunknown_key = 1\n");
    assert_eq!(run(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn module_error_exits_1_with_json() {
    let dir = scratch("module");
    let cfg = write_config(&dir, "experiment = \"ensemble\"\nn = [20]\nsamples = 2\niterations = 1\n");
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(o.stderr.trim_ascii()).unwrap();
    assert_eq!(err["error"], "dimension_limit");
}

#[test]
fn run_is_reproducible_and_well_formed() {
    let dir = scratch("run");
    let cfg = write_config(&dir, TRAJECTORY);
    let mut csvs = Vec::new();
    for sub in ["a", "b"] {
        let out = dir.join(sub);
        let o = run(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "3"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        csvs.push(std::fs::read(out.join("trajectory.csv")).unwrap());
        let record: serde_json::Value =
            serde_json::from_slice(&std::fs::read(out.join("trajectory.json")).unwrap()).unwrap();
        assert_eq!(record["seed"], 3);
        assert_eq!(record["config"]["iterations"], 6);
    }
    assert_eq!(csvs[0], csvs[1]);

    let text = String::from_utf8(csvs.pop().unwrap()).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# pr-markov "));
    assert_eq!(lines.next().unwrap(), "topology,gate,n,c,p,iteration,expected_q,q_deviation");
    // 2 topologies × 2 values of c × 7 iterations
    assert_eq!(lines.count(), 28);
}

#[test]
fn flags_override_config() {
    let dir = scratch("override");
    let cfg = write_config(&dir, TRAJECTORY);
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap(), "--iterations", "2", "--c", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    assert_eq!(text.lines().count(), 2 + 2 * 3);
    assert!(text.lines().skip(2).all(|l| l.split(',').nth(3) == Some("0.5")));
}
