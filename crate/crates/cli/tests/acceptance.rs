//! Runs every suite at its reference configuration and prints one line per
//! acceptance criterion. Exits nonzero when a criterion fails, unless it is
//! listed in `KNOWN_FAILURES`, or when a listed criterion starts passing.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bolab_cli::{execute, Check, Command, Config, RunSummary};

const KNOWN_FAILURES: &[&str] = &["D^1/2 weight bound uniformity"];

struct Criterion {
    name: &'static str,
    pass: bool,
    detail: String,
}

struct Runs {
    root: PathBuf,
    summaries: BTreeMap<&'static str, Result<RunSummary, String>>,
}

impl Runs {
    fn run(&mut self, label: &'static str, command: Command, config: &Config) {
        let result = execute(command, config, self.root.join(label)).map_err(|e| e.to_string());
        self.summaries.insert(label, result);
    }

    /// Combines the named checks of one run into a criterion.
    fn criterion(&self, name: &'static str, label: &str, checks: &[&str]) -> Criterion {
        let summary = match &self.summaries[label] {
            Ok(s) => s,
            Err(e) => return Criterion { name, pass: false, detail: format!("{label} failed: {e}") },
        };
        let all: Vec<&Check> = summary.output.checks.iter().chain(&summary.output.timings).collect();
        let mut pass = true;
        let mut details = Vec::new();
        for want in checks {
            let exact: Vec<&&Check> = all.iter().filter(|c| c.name == *want).collect();
            let found = if exact.is_empty() {
                all.iter().filter(|c| c.name.starts_with(want)).collect()
            } else {
                exact
            };
            if found.is_empty() {
                pass = false;
                details.push(format!("{want}: missing"));
            }
            for c in found {
                pass &= c.pass;
                details.push(format!("{}: {}", c.name, c.detail));
            }
        }
        Criterion { name, pass, detail: details.join(" | ") }
    }
}

fn files(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).into_iter().flatten().flatten() {
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.file_name().is_some_and(|n| n != "manifests.jsonl") {
                let bytes = std::fs::read(&path).unwrap_or_default();
                out.insert(path.strip_prefix(dir).unwrap().to_path_buf(), bytes);
            }
        }
    }
    out
}

fn determinism(first: &Path, second: &Path) -> Criterion {
    let (a, b) = (files(first), files(second));
    let differing: Vec<String> = a
        .keys()
        .chain(b.keys())
        .filter(|k| a.get(*k) != b.get(*k))
        .map(|k| k.display().to_string())
        .collect();
    Criterion {
        name: "Determinism",
        pass: !a.is_empty() && differing.is_empty(),
        detail: if differing.is_empty() {
            format!("{} CSV/JSON/binary files byte-identical across two runs", a.len())
        } else {
            format!("differ: {}", differing.join(", "))
        },
    }
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let mut config = Config::default();
    config.solve.suite = true;

    let mut runs = Runs { root: tmp.path().join("first"), summaries: BTreeMap::new() };
    let commands = [
        ("identities", Command::Identities),
        ("commutators", Command::Commutators),
        ("weights", Command::Weights),
        ("solve", Command::Solve),
        ("persistence", Command::Persistence),
    ];
    for (label, command) in commands {
        runs.run(label, command, &config);
    }
    let mut repeat = Runs { root: tmp.path().join("second"), summaries: BTreeMap::new() };
    for (label, command) in commands {
        repeat.run(label, command, &config);
    }

    let criteria = [
        runs.criterion("Identity suite", "identities", &["identity suite", "identity suite runtime"]),
        runs.criterion("Id1d dichotomy", "identities", &["commutator dichotomy"]),
        runs.criterion("Hilbert oracle", "identities", &["Hilbert oracle"]),
        runs.criterion("General Argument", "commutators", &["General Argument"]),
        runs.criterion("A2 classification", "weights", &["A2 classification"]),
        runs.criterion("D^1/2 weight bound uniformity", "commutators", &["D^1/2 weight bound uniformity"]),
        runs.criterion("Solver", "solve", &["solver", "solver runtime"]),
        runs.criterion("First-moment law", "solve", &["first-moment law"]),
        runs.criterion("Persistence thresholds", "persistence", &["persistence gaussian", "persistence dipole", "persistence runtime"]),
        runs.criterion("Smoothing budgets", "persistence", &["smoothing budgets"]),
        determinism(&runs.root, &repeat.root),
    ];

    let mut unexpected = Vec::new();
    for c in &criteria {
        let known = KNOWN_FAILURES.contains(&c.name);
        let tag = match (c.pass, known) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known)",
            _ => {
                unexpected.push(c.name);
                if c.pass { "PASS (listed as known failure)" } else { "FAIL" }
            }
        };
        println!("{tag} {}: {}", c.name, c.detail);
    }
    let passed = criteria.iter().filter(|c| c.pass).count();
    println!("acceptance: {passed}/{} criteria pass", criteria.len());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected: {}", unexpected.join(", "));
        ExitCode::FAILURE
    }
}
