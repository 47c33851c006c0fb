use bolab::spectral::Grid;
use bolab::weights::{
    a2_scan, expected_verdict, weighted_hilbert_ratio, A2Scan, A2Verdict, A2WeightKind, TruncatedWeight,
    WeightKind, PLATEAU_TOL,
};
use bolab::fracops::{random_band_limited, trial_rng, EnsembleLaw};
use serde::{Deserialize, Serialize};

use super::SuiteOutput;
use crate::error::Result;
use crate::output::OutputDir;
use crate::Check;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeightsConfig {
    pub betas: Vec<f64>,
    pub power_levels: usize,
    pub bracket_levels: usize,
    pub radius: f64,
    pub caps: Vec<f64>,
    pub exponents: Vec<f64>,
    pub hilbert_betas: Vec<f64>,
    pub hilbert_n: usize,
    pub hilbert_half_length: f64,
}

impl Default for WeightsConfig {
    fn default() -> Self {
        WeightsConfig {
            betas: vec![-0.6, -0.5, -0.49, -0.4, -0.2, 0.2, 0.4, 0.49, 0.5, 0.6],
            power_levels: 8,
            bracket_levels: 13,
            radius: 1.0,
            caps: vec![16.0, 64.0, 256.0, 1024.0],
            exponents: vec![0.6, 0.8, 1.0, 2.0],
            hilbert_betas: vec![-0.4, -0.2, 0.0, 0.2, 0.4],
            hilbert_n: 2048,
            hilbert_half_length: 64.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct A2Row {
    pub kind: A2WeightKind,
    pub beta: f64,
    pub level: usize,
    pub constant: f64,
    pub min_length: f64,
    pub max_length: f64,
    pub verdict: A2Verdict,
    pub expected: A2Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditRow {
    pub cap: f64,
    pub exponent: f64,
    pub slope_bound: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub consistency: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HilbertRow {
    pub beta: f64,
    pub trials: usize,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightsReport {
    pub scans: Vec<A2Scan>,
    pub audits: Vec<AuditRow>,
    pub weighted_hilbert: Vec<HilbertRow>,
    pub checks: Vec<Check>,
}

pub fn run(cfg: &WeightsConfig, seed: u64, out: &mut OutputDir) -> Result<SuiteOutput> {
    let mut scans = Vec::new();
    for (kind, levels) in [(A2WeightKind::Power, cfg.power_levels), (A2WeightKind::Bracket, cfg.bracket_levels)] {
        for &beta in &cfg.betas {
            scans.push(a2_scan(beta, kind, levels, cfg.radius)?);
        }
    }
    let wrong: Vec<String> = scans
        .iter()
        .filter(|s| s.verdict != expected_verdict(s.beta))
        .map(|s| format!("{:?} {} read {:?}", s.kind, s.beta, s.verdict))
        .collect();
    let worst_plateau = scans
        .iter()
        .filter(|s| expected_verdict(s.beta) == A2Verdict::Finite)
        .map(|s| s.last_change)
        .fold(0.0, f64::max);
    let a2_rows: Vec<A2Row> = scans
        .iter()
        .flat_map(|s| {
            s.levels.iter().map(move |l| A2Row {
                kind: s.kind,
                beta: s.beta,
                level: l.level,
                constant: l.constant,
                min_length: l.min_length,
                max_length: l.max_length,
                verdict: s.verdict,
                expected: expected_verdict(s.beta),
            })
        })
        .collect();

    let mut audits = Vec::new();
    for &e in &cfg.exponents {
        for &n in &cfg.caps {
            let a = TruncatedWeight::new(n, e)?.audit().clone();
            let [c0, c1, c2, c3] = a.derivative_constants;
            audits.push(AuditRow {
                cap: n,
                exponent: e,
                slope_bound: a.slope_bound,
                c0,
                c1,
                c2,
                c3,
                consistency: a.consistency,
                pass: a.pass,
            });
        }
    }
    let audit_spread = cfg
        .exponents
        .iter()
        .map(|&e| {
            let rows: Vec<&AuditRow> = audits.iter().filter(|r| r.exponent == e).collect();
            (0..4)
                .map(|k| {
                    let v: Vec<f64> = rows.iter().map(|r| [r.c0, r.c1, r.c2, r.c3][k]).collect();
                    super::relative_spread(&v)
                })
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);

    let grid = Grid::new(cfg.hilbert_n, cfg.hilbert_half_length)?;
    let law = EnsembleLaw::default();
    let trials = 20;
    let weighted_hilbert: Vec<HilbertRow> = cfg
        .hilbert_betas
        .iter()
        .map(|&beta| {
            let max_ratio = (0..trials as u64)
                .map(|i| {
                    let f = random_band_limited(&grid, &law, &mut trial_rng(seed, i));
                    weighted_hilbert_ratio(&f, beta, WeightKind::Exact)
                })
                .collect::<bolab::Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            Ok(HilbertRow { beta, trials, max_ratio })
        })
        .collect::<Result<_>>()?;

    let checks = vec![
        Check::new(
            "A2 classification",
            wrong.is_empty() && worst_plateau <= PLATEAU_TOL,
            if wrong.is_empty() {
                format!(
                    "{} scans match the sharp range |beta| < 1/2; worst finite last change {:.1}%",
                    scans.len(),
                    100.0 * worst_plateau
                )
            } else {
                format!("misclassified: {}", wrong.join("; "))
            },
        ),
        Check::new(
            "truncated weight audit",
            audits.iter().all(|a| a.pass) && audit_spread <= 0.05,
            format!("{} weights audited, derivative constants vary {:.1}% across caps", audits.len(), 100.0 * audit_spread),
        ),
        Check::new(
            "weighted Hilbert bound",
            weighted_hilbert.iter().all(|h| h.max_ratio.is_finite()),
            weighted_hilbert
                .iter()
                .map(|h| format!("beta {}: {:.3}", h.beta, h.max_ratio))
                .collect::<Vec<_>>()
                .join(", "),
        ),
    ];
    let report = WeightsReport {
        scans,
        audits: audits.clone(),
        weighted_hilbert: weighted_hilbert.clone(),
        checks: checks.clone(),
    };
    out.write_json("weights.json", &report)?;
    out.write_csv("a2_scan.csv", &a2_rows)?;
    out.write_csv("weight_audit.csv", &audits)?;
    out.write_csv("weighted_hilbert.csv", &weighted_hilbert)?;
    Ok(SuiteOutput { checks, timings: vec![], grids: vec![(&grid).into()], convention: None, steps: 0 })
}
