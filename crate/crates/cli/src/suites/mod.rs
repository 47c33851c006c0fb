//! One module per subcommand. Each `run` writes its files and returns the
//! checks it evaluated.

pub mod commutators;
pub mod identities;
pub mod persistence;
pub mod solve;
pub mod weights;

use crate::output::GridParams;
use crate::Check;

#[derive(Debug, Default)]
pub struct SuiteOutput {
    /// Deterministic checks, also written to the report.
    pub checks: Vec<Check>,
    /// Wall-clock checks, recorded only in the manifest.
    pub timings: Vec<Check>,
    pub grids: Vec<GridParams>,
    pub convention: Option<serde_json::Value>,
    pub steps: u64,
}

pub(crate) fn relative_spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::MIN, f64::max);
    let min = values.iter().copied().fold(f64::MAX, f64::min);
    if max > 0.0 { (max - min) / max } else { 0.0 }
}

pub(crate) fn timing(name: &str, elapsed: std::time::Duration, limit_s: f64) -> Check {
    let s = elapsed.as_secs_f64();
    Check::new(name, s < limit_s, format!("{s:.2} s (limit {limit_s} s)"))
}
