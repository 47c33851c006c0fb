use std::path::Path;
use std::process::{Command, Output};

use bolab_cli::Config;

fn bolab(dir: &Path, config: Option<&str>, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bolab"));
    cmd.arg("--out").arg(dir.join("out"));
    if let Some(text) = config {
        let path = dir.join("config.toml");
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn undersized_grid_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let o = bolab(dir.path(), Some("[solve]\nn = 8\n"), &["solve"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn half_derivative_identity_needs_mean_zero_input() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"
[identities]
n = 1024
half_length = 64.0
cases = [{ identity = "Id3", data = { family = "gaussian", amplitude = 1.0, center = 0.0, width = 1.0 } }]
"#;
    let o = bolab(dir.path(), Some(config), &["identities"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("mean-zero"), "{}", stderr(&o));
}

#[test]
fn unstable_step_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let o = bolab(dir.path(), None, &["solve", "--dt", "0.5"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn empty_weight_list_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"
[persistence]
scans = []
stability_check = false
experiments = [{ data = { family = "gaussian", amplitude = 1.0, center = 0.0, width = 1.0 }, r_list = [] }]

[persistence.budgets]
families = []
"#;
    let o = bolab(dir.path(), Some(config), &["persistence"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn zero_data_runs_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"
[solve]
n = 1024
half_length = 32.0
t_end = 0.1
data = { family = "gaussian", amplitude = 0.0, center = 0.0, width = 1.0 }
"#;
    let o = bolab(dir.path(), Some(config), &["solve"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let conserved = std::fs::read_to_string(dir.path().join("out/conserved.csv")).unwrap();
    assert!(conserved.lines().count() > 1);
}

#[test]
fn parse_errors_report_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let o = bolab(dir.path(), Some("seed = 3\n[solve]\nbogus = 1\n"), &["solve"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 3") && err.contains("bogus"), "{err}");
}

#[test]
fn printed_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = bolab(dir.path(), None, &["--seed", "11", "--print-config", "weights"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let parsed = Config::from_toml(&text).unwrap();
    assert_eq!(parsed.seed, 11);
    assert_eq!(parsed.to_toml(), text);
    assert!(!dir.path().join("out").exists());
}

#[test]
fn manifest_records_every_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = "[solve]\nn = 512\nhalf_length = 16.0\nt_end = 0.05\nsnapshot_every = 10\n";
    for _ in 0..2 {
        let o = bolab(dir.path(), Some(config), &["solve", "--quiet"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let text = std::fs::read_to_string(dir.path().join("out/manifests.jsonl")).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    let m = &lines[1];
    assert_eq!(m["command"], "solve");
    assert_eq!(m["exit_code"], 0);
    assert_eq!(m["steps"], 50);
    let outputs = m["outputs"].as_array().unwrap();
    assert!(outputs.iter().any(|a| a["path"] == "conserved.csv"));
    for a in outputs {
        let bytes = std::fs::read(dir.path().join("out").join(a["path"].as_str().unwrap())).unwrap();
        assert_eq!(a["bytes"].as_u64().unwrap() as usize, bytes.len());
        assert_eq!(a["sha256"].as_str().unwrap().len(), 64);
    }
}
