use std::time::Instant;

use bolab::persistence::{
    budget_drift, make_data, run_persistence, scan_from_report, smoothing_budget, threshold_scan, BudgetVariant,
    DataFamily, ExperimentSpec, LadderSpec, PersistenceReport, ScanRow, SmoothingBudget, ThresholdScan, Verdict,
};
use bolab::solver::{run_collect, DispersionSign, SolverConfig};
use bolab::spectral::Grid;
use serde::{Deserialize, Serialize};

use super::{timing, SuiteOutput};
use crate::error::{CliError, Result};
use crate::output::{GridParams, OutputDir};
use crate::{describe, Check};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub data: DataFamily,
    pub r_list: Vec<f64>,
    #[serde(default = "default_s_list")]
    pub s_list: Vec<f64>,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_window")]
    pub t_window: [f64; 2],
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub expect_persists: Vec<f64>,
    #[serde(default)]
    pub expect_diverges: Vec<f64>,
}

fn default_s_list() -> Vec<f64> {
    vec![0.0, 2.0]
}
fn default_theta() -> f64 {
    0.3
}
fn default_window() -> [f64; 2] {
    [0.0, 1.0]
}
fn default_samples() -> usize {
    5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub data: DataFamily,
    pub r_grid: Vec<f64>,
    pub t_probe: f64,
    /// Expected `(largest persisting r, smallest diverging r)`.
    #[serde(default)]
    pub expect_boundary: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetConfig {
    pub families: Vec<DataFamily>,
    pub thetas: Vec<f64>,
    pub caps: Vec<f64>,
    pub half_length: f64,
    pub dx: f64,
    pub t_end: f64,
    /// Odd number of snapshots on `[0, t_end]`.
    pub snapshots: usize,
    pub drift_tol: f64,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        BudgetConfig {
            families: vec![DataFamily::gaussian(), DataFamily::dipole(), DataFamily::soliton()],
            thetas: vec![0.3, 0.45],
            caps: vec![8.0, 16.0, 32.0],
            half_length: 128.0,
            dx: 0.0625,
            t_end: 1.0,
            snapshots: 21,
            drift_tol: 0.1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PersistenceConfig {
    pub ladder: LadderSpec,
    pub dt: f64,
    pub sign: DispersionSign,
    pub experiments: Vec<Experiment>,
    pub scans: Vec<ScanConfig>,
    pub budgets: BudgetConfig,
    /// Repeat the first experiment on a ladder one level longer.
    pub stability_check: bool,
    pub runtime_limit_s: f64,
}

impl Default for PersistenceConfig {
    fn default() -> Self {
        let experiment = |data, r_list: Vec<f64>, p: f64, d: f64| Experiment {
            data,
            r_list,
            s_list: default_s_list(),
            theta: default_theta(),
            t_window: default_window(),
            samples: default_samples(),
            expect_persists: vec![p],
            expect_diverges: vec![d],
        };
        PersistenceConfig {
            ladder: LadderSpec::default(),
            dt: 1e-3,
            sign: DispersionSign::Plus,
            experiments: vec![
                experiment(DataFamily::gaussian(), vec![2.0, 2.2, 2.4, 2.6, 2.8], 2.0, 2.6),
                experiment(DataFamily::dipole(), vec![2.6, 3.2, 3.4, 3.6], 2.6, 3.6),
            ],
            scans: vec![
                ScanConfig {
                    data: DataFamily::soliton(),
                    r_grid: vec![1.3, 1.4, 1.5, 1.6],
                    t_probe: 0.0,
                    expect_boundary: Some([1.4, 1.6]),
                },
                ScanConfig {
                    data: DataFamily::gaussian(),
                    r_grid: vec![2.2, 2.4, 2.6, 2.8],
                    t_probe: 1.0,
                    expect_boundary: Some([2.4, 2.6]),
                },
                ScanConfig {
                    data: DataFamily::dipole(),
                    r_grid: vec![3.2, 3.4, 3.6],
                    t_probe: 1.0,
                    expect_boundary: Some([3.4, 3.6]),
                },
            ],
            budgets: BudgetConfig::default(),
            stability_check: true,
            runtime_limit_s: 1800.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictRow {
    pub family: String,
    pub s: f64,
    pub r: f64,
    pub regime: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormSeriesRow {
    pub family: String,
    pub level: usize,
    pub half_length: f64,
    pub t: f64,
    pub s: f64,
    pub r: f64,
    pub sobolev: f64,
    pub weighted: f64,
    pub z: f64,
    pub mean_mode: f64,
    pub tail_fraction: f64,
    pub band_edge: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BudgetRow {
    pub family: String,
    pub variant: BudgetVariant,
    pub theta: f64,
    pub cap: f64,
    pub value: f64,
    pub coarse: f64,
    pub stride_audit: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BudgetSummary {
    pub family: String,
    pub variant: BudgetVariant,
    pub theta: f64,
    pub drift: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PersistenceOutput {
    pub reports: Vec<PersistenceReport>,
    pub scans: Vec<ThresholdScan>,
    pub budgets: Vec<BudgetSummary>,
    pub checks: Vec<Check>,
}

fn spec_for(cfg: &PersistenceConfig, e: &Experiment) -> ExperimentSpec {
    ExperimentSpec {
        data: e.data,
        r_list: e.r_list.clone(),
        s_list: e.s_list.clone(),
        theta: e.theta,
        t_window: e.t_window,
        samples: e.samples,
        ladder: cfg.ladder,
        dt: cfg.dt,
        sign: cfg.sign,
    }
}

fn verdict_at(report: &PersistenceReport, r: f64) -> Option<Verdict> {
    report.pairs.iter().find(|p| p.s == 0.0 && p.r == r).map(|p| p.verdict)
}

fn expectation_check(e: &Experiment, report: &PersistenceReport) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (want, rs) in [(Verdict::Persists, &e.expect_persists), (Verdict::Diverges, &e.expect_diverges)] {
        for &r in rs {
            let got = verdict_at(report, r);
            ok &= got == Some(want);
            parts.push(format!("r = {r}: {}", got.map_or("missing".to_string(), |v| v.to_string())));
        }
    }
    (ok, parts.join(", "))
}

pub fn budgets_for(family: &DataFamily, cfg: &BudgetConfig, dt: f64, sign: DispersionSign) -> Result<Vec<SmoothingBudget>> {
    if cfg.snapshots < 3 || cfg.snapshots.is_multiple_of(2) {
        return Err(CliError::Config(format!("budgets.snapshots = {} must be odd and at least 3", cfg.snapshots)));
    }
    let grid = Grid::with_spacing(cfg.half_length, cfg.dx)?;
    let u0 = make_data(family, &grid)?;
    let probe = SolverConfig::new(&grid, dt, cfg.t_end, sign)?;
    let intervals = cfg.snapshots - 1;
    let steps = probe.steps().div_ceil(intervals) * intervals;
    let solver = SolverConfig::new(&grid, cfg.t_end / steps as f64, cfg.t_end, sign)?
        .with_snapshot_every(steps / intervals);
    let (_, snaps) = run_collect(&solver, &u0)?;
    let mut out = Vec::new();
    for &theta in &cfg.thetas {
        for variant in [BudgetVariant::Step1, BudgetVariant::Step3] {
            for &cap in &cfg.caps {
                out.push(smoothing_budget(&snaps, theta, variant, cap)?);
            }
        }
    }
    Ok(out)
}

pub fn run(cfg: &PersistenceConfig, out: &mut OutputDir) -> Result<SuiteOutput> {
    let clock = Instant::now();
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    let mut grids: Vec<GridParams> = cfg.ladder.grids()?.iter().map(Into::into).collect();
    let mut steps = 0u64;
    for e in &cfg.experiments {
        let spec = spec_for(cfg, e);
        let report = run_persistence(&spec)?;
        steps += (spec.t_window[1] / cfg.dt).round() as u64 * report.levels.len() as u64;
        let (ok, detail) = expectation_check(e, &report);
        let scan = scan_from_report(&report, spec.t_window[1]);
        let verdicts: Vec<Verdict> = e.r_list.iter().filter_map(|&r| verdict_at(&report, r)).collect();
        let monotone = bolab::persistence::is_monotone(
            &e.r_list.iter().copied().zip(verdicts.iter().copied()).collect::<Vec<_>>(),
        );
        let mean_zero_ok = !e.data.is_mean_zero()
            || report.mean_zero.max_deviation.max(report.mean_zero.initial.abs())
                <= 1e-12 * report.levels[0].samples[0].l2;
        checks.push(Check::new(
            format!("persistence {}", describe(&e.data)),
            ok && monotone && scan.monotone && mean_zero_ok && report.high_weight_only_mean_zero,
            format!(
                "{detail}; verdicts over r = {:?}: {}; {}; mean mode drift {:.1e}",
                e.r_list,
                verdicts.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "),
                if monotone { "monotone" } else { "not monotone" },
                report.mean_zero.max_deviation,
            ),
        ));
        reports.push(report);
    }

    if cfg.stability_check {
        if let (Some(e), Some(base)) = (cfg.experiments.first(), reports.first()) {
            let mut spec = spec_for(cfg, e);
            spec.ladder.levels += 1;
            spec.s_list = vec![0.0];
            let extended = run_persistence(&spec)?;
            grids.extend(spec.ladder.grids()?.last().map(GridParams::from));
            let changed: Vec<String> = e
                .r_list
                .iter()
                .filter(|&&r| {
                    let (a, b) = (verdict_at(base, r), verdict_at(&extended, r));
                    a != b && a != Some(Verdict::Inconclusive)
                })
                .map(|r| r.to_string())
                .collect();
            checks.push(Check::new(
                "verdict stability",
                changed.is_empty(),
                if changed.is_empty() {
                    format!("{} verdicts unchanged with {} levels", describe(&e.data), spec.ladder.levels)
                } else {
                    format!("verdicts changed at r = {}", changed.join(", "))
                },
            ));
        }
    }

    let mut scans = Vec::new();
    for s in &cfg.scans {
        let scan = threshold_scan(s.data, s.r_grid.clone(), s.t_probe, cfg.ladder, cfg.dt)?;
        let expected = s.expect_boundary.is_none_or(|[lo, hi]| scan.boundary == Some((lo, hi)));
        checks.push(Check::new(
            format!("threshold scan {} at t = {}", scan.family, s.t_probe),
            scan.monotone && expected,
            format!(
                "{}; boundary {}",
                scan.verdicts.iter().map(|(r, v)| format!("{r}:{v}")).collect::<Vec<_>>().join(" "),
                scan.boundary.map_or("none".to_string(), |(a, b)| format!("({a}, {b})")),
            ),
        ));
        scans.push(scan);
    }

    let mut budget_rows = Vec::new();
    let mut summaries = Vec::new();
    for family in &cfg.budgets.families {
        let budgets = budgets_for(family, &cfg.budgets, cfg.dt, cfg.sign)?;
        for b in &budgets {
            budget_rows.push(BudgetRow {
                family: describe(family),
                variant: b.variant,
                theta: b.theta,
                cap: b.cap,
                value: b.value,
                coarse: b.coarse,
                stride_audit: b.stride_audit,
            });
        }
        for &theta in &cfg.budgets.thetas {
            for variant in [BudgetVariant::Step1, BudgetVariant::Step3] {
                let group: Vec<SmoothingBudget> =
                    budgets.iter().filter(|b| b.theta == theta && b.variant == variant).cloned().collect();
                let drift = budget_drift(&group);
                summaries.push(BudgetSummary {
                    family: describe(family),
                    variant,
                    theta,
                    drift,
                    pass: drift < cfg.budgets.drift_tol
                        && group.iter().all(|b| b.value.is_finite() && b.stride_audit),
                });
            }
        }
    }
    if !summaries.is_empty() {
        let worst = summaries.iter().map(|s| s.drift).fold(0.0, f64::max);
        checks.push(Check::new(
            "smoothing budgets",
            summaries.iter().all(|s| s.pass),
            format!(
                "{} (family, variant, theta) groups over N = {:?}; worst drift {:.2}%{}",
                summaries.len(),
                cfg.budgets.caps,
                100.0 * worst,
                if budget_rows.iter().all(|b| b.stride_audit) { "" } else { "; stride audit failed" },
            ),
        ));
        grids.push((&Grid::with_spacing(cfg.budgets.half_length, cfg.budgets.dx)?).into());
    }

    let mut verdict_rows = Vec::new();
    let mut norm_rows = Vec::new();
    for report in &reports {
        let family = describe(&report.spec.data);
        for p in &report.pairs {
            verdict_rows.push(VerdictRow {
                family: family.clone(),
                s: p.s,
                r: p.r,
                regime: format!("{:?}", p.regime),
                verdict: p.verdict,
            });
        }
        for (level, run) in report.levels.iter().enumerate() {
            for sample in &run.samples {
                for n in &sample.norms {
                    norm_rows.push(NormSeriesRow {
                        family: family.clone(),
                        level,
                        half_length: run.half_length,
                        t: sample.t,
                        s: n.s,
                        r: n.r,
                        sobolev: n.sobolev,
                        weighted: n.weighted,
                        z: n.z,
                        mean_mode: sample.mean_mode,
                        tail_fraction: sample.tail_fraction,
                        band_edge: sample.band_edge,
                    });
                }
            }
        }
    }
    let scan_rows: Vec<ScanRow> = scans.iter().flat_map(|s| s.rows.iter().cloned()).collect();
    let report = PersistenceOutput { reports, scans, budgets: summaries, checks: checks.clone() };
    out.write_json("persistence.json", &report)?;
    out.write_csv("verdicts.csv", &verdict_rows)?;
    out.write_csv("norm_series.csv", &norm_rows)?;
    out.write_csv("scan.csv", &scan_rows)?;
    out.write_csv("budgets.csv", &budget_rows)?;
    Ok(SuiteOutput {
        checks,
        timings: vec![timing("persistence runtime", clock.elapsed(), cfg.runtime_limit_s)],
        grids,
        convention: None,
        steps,
    })
}
