//! Command-line driver for the bolab suites: configuration, run manifests
//! and CSV/JSON emission.

pub mod config;
pub mod error;
pub mod output;
pub mod suites;

use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use bolab::persistence::DataFamily;
use serde::Serialize;

pub use config::Config;
pub use error::{CliError, Result};
pub use output::{OutputDir, RunManifest};
pub use suites::SuiteOutput;

/// One pass/fail line.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), pass, detail: detail.into() }
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Identities,
    Solve,
    Persistence,
    Weights,
    Commutators,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Identities => "identities",
            Command::Solve => "solve",
            Command::Persistence => "persistence",
            Command::Weights => "weights",
            Command::Commutators => "commutators",
        }
    }
}

/// Result of one command: the suite output plus the exit code it maps to.
#[derive(Debug)]
pub struct RunSummary {
    pub output: SuiteOutput,
    pub exit_code: i32,
}

impl RunSummary {
    pub fn pass(&self) -> bool {
        self.exit_code == 0
    }

    pub fn lines(&self) -> Vec<String> {
        self.output.checks.iter().chain(&self.output.timings).map(Check::line).collect()
    }
}

/// Runs a command into `out`, writes its files and appends the manifest.
pub fn execute(command: Command, config: &Config, out: impl AsRef<Path>) -> Result<RunSummary> {
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let mut dir = OutputDir::create(out)?;
    let output = match command {
        Command::Identities => suites::identities::run(&config.identities, &mut dir)?,
        Command::Solve => suites::solve::run(&config.solve, &mut dir)?,
        Command::Persistence => suites::persistence::run(&config.persistence, &mut dir)?,
        Command::Weights => suites::weights::run(&config.weights, config.seed, &mut dir)?,
        Command::Commutators => suites::commutators::run(&config.commutators, config.seed, &mut dir)?,
    };
    let pass = output.checks.iter().chain(&output.timings).all(|c| c.pass);
    let exit_code = if pass { 0 } else { 1 };
    let manifest = RunManifest {
        command: command.name().to_string(),
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        config: serde_json::to_value(config)?,
        seed: config.seed,
        grids: output.grids.clone(),
        convention: output.convention.clone(),
        outputs: dir.artifacts().to_vec(),
        steps: output.steps,
        timings: output.timings.clone(),
        pass,
        exit_code,
        started_unix,
        wall_clock_s: clock.elapsed().as_secs_f64(),
    };
    dir.append_manifest(&manifest)?;
    Ok(RunSummary { output, exit_code })
}

/// Short human-readable label for a data family.
pub fn describe(family: &DataFamily) -> String {
    match *family {
        DataFamily::Gaussian { amplitude, center, width } => {
            format!("gaussian(a={amplitude}, x0={center}, w={width})")
        }
        DataFamily::Dipole { amplitude, center, width } => {
            format!("dipole(a={amplitude}, x0={center}, w={width})")
        }
        DataFamily::Soliton { c, center, positive } => {
            format!("soliton(c={c}, x0={center}, {})", if positive { "+" } else { "-" })
        }
        DataFamily::FourierCusp { gamma } => format!("fourier-cusp(gamma={gamma})"),
    }
}
