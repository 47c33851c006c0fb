use serde::Serialize;

use crate::error::Result;

use super::classify::Verdict;
use super::data::DataFamily;
use super::run::{run_persistence, PersistenceReport};
use super::spec::{ExperimentSpec, LadderSpec};

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub family: String,
    pub r: f64,
    pub level: usize,
    pub half_length: f64,
    pub norm: f64,
    pub rho: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdScan {
    pub family: String,
    pub t_probe: f64,
    pub verdicts: Vec<(f64, Verdict)>,
    /// Largest persisting `r` and smallest diverging `r`.
    pub boundary: Option<(f64, f64)>,
    /// Persisting values all lie below diverging ones.
    pub monotone: bool,
    pub rows: Vec<ScanRow>,
}

/// Verdicts along a sorted `r` grid are monotone when they read
/// PERSISTS..., INCONCLUSIVE..., DIVERGES... in that order.
pub fn is_monotone(verdicts: &[(f64, Verdict)]) -> bool {
    let rank = |v: Verdict| match v {
        Verdict::Persists => 0,
        Verdict::Inconclusive => 1,
        Verdict::Diverges => 2,
    };
    verdicts.windows(2).all(|w| rank(w[0].1) <= rank(w[1].1))
}

/// Classifies `||<x>^r u(t_probe)||` across the ladder for every `r`.
pub fn threshold_scan(
    data: DataFamily,
    mut r_grid: Vec<f64>,
    t_probe: f64,
    ladder: LadderSpec,
    dt: f64,
) -> Result<ThresholdScan> {
    r_grid.sort_by(f64::total_cmp);
    let mut spec = ExperimentSpec::reference(data, r_grid);
    spec.s_list.clear();
    spec.t_window = [t_probe, t_probe];
    spec.samples = 1;
    spec.ladder = ladder;
    spec.dt = dt;
    let report = run_persistence(&spec)?;
    Ok(scan_from_report(&report, t_probe))
}

pub fn scan_from_report(report: &PersistenceReport, t_probe: f64) -> ThresholdScan {
    let family = report.spec.data.name().to_string();
    let mut verdicts = Vec::new();
    let mut rows = Vec::new();
    for pair in report.pairs.iter().filter(|p| p.s == 0.0) {
        let Some(tv) = pair.series.iter().min_by(|a, b| (a.t - t_probe).abs().total_cmp(&(b.t - t_probe).abs())) else {
            continue;
        };
        verdicts.push((pair.r, tv.verdict));
        for (level, (norm_sq, lvl)) in tv.ladder.norms_sq.iter().zip(&report.levels).enumerate() {
            rows.push(ScanRow {
                family: family.clone(),
                r: pair.r,
                level,
                half_length: lvl.half_length,
                norm: norm_sq.sqrt(),
                rho: tv.ladder.rho,
                verdict: tv.verdict,
            });
        }
    }
    let last_per = verdicts.iter().rev().find(|v| v.1 == Verdict::Persists).map(|v| v.0);
    let first_div = verdicts.iter().find(|v| v.1 == Verdict::Diverges).map(|v| v.0);
    let monotone = is_monotone(&verdicts);
    ThresholdScan {
        family,
        t_probe,
        boundary: last_per.zip(first_div).filter(|_| monotone),
        monotone,
        verdicts,
        rows,
    }
}
