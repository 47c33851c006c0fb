use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::solver::{run_with, SolverConfig};
use crate::spectral::{Field, Grid};
use crate::weights::{z_norm, NormRecord, WeightKind};

use super::classify::{classify_ladder, combine, LadderVerdict, Verdict, SAMPLE_NOISE};
use super::data::make_data;
use super::spec::{ExperimentSpec, Regime};

/// Share of `I2` allowed in the outer quarter of the box at `t > 0`.
pub const TAIL_BUDGET: f64 = 1e-6;
/// Largest `|u_hat|` allowed in the top tenth of the de-aliased band,
/// relative to the largest `|u_hat|`. The band edge is a jump whose
/// `1/x` ringing the weights would amplify.
pub const BAND_EDGE_BUDGET: f64 = 1e-10;

/// Everything measured on one box at one sampled time.
#[derive(Debug, Clone, Serialize)]
pub struct LevelSample {
    pub t: f64,
    pub mean_mode: f64,
    pub l2: f64,
    /// `int_{|x| > 3L/4} u^2 / int u^2`.
    pub tail_fraction: f64,
    pub tail_ok: bool,
    /// Relative `|u_hat|` in the top tenth of the de-aliased band.
    pub band_edge: f64,
    pub resolved: bool,
    /// Rounding level of `||<x>^r u||^2` on this box, per `r`.
    pub noise: Vec<f64>,
    /// One record per `(s, r)` pair, `s` outer.
    pub norms: Vec<NormRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelRun {
    pub n: usize,
    pub half_length: f64,
    pub samples: Vec<LevelSample>,
    /// Set when the solver aborted; holds the last finite time.
    pub aborted_at: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TimeVerdict {
    pub t: f64,
    pub z: Vec<f64>,
    pub ladder: LadderVerdict,
    pub tails_ok: bool,
    pub resolved: bool,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairReport {
    pub s: f64,
    pub r: f64,
    pub regime: Regime,
    pub series: Vec<TimeVerdict>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeanZeroStatus {
    pub initial: f64,
    /// Largest `|u_hat(0, t) - u_hat(0, 0)|` over levels and times.
    pub max_deviation: f64,
    pub mean_zero: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PersistenceReport {
    pub spec: ExperimentSpec,
    pub levels: Vec<LevelRun>,
    pub pairs: Vec<PairReport>,
    pub mean_zero: MeanZeroStatus,
    /// False when some `r >= 5/2` persists for data that is not mean-zero.
    pub high_weight_only_mean_zero: bool,
}

impl PersistenceReport {
    pub fn verdict_for(&self, r: f64) -> Option<Verdict> {
        self.pairs.iter().find(|p| (p.r - r).abs() < 1e-12).map(|p| p.verdict)
    }

    pub fn aborted(&self) -> bool {
        self.levels.iter().any(|l| l.aborted_at.is_some())
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn s_values(spec: &ExperimentSpec) -> Vec<f64> {
    if spec.s_list.is_empty() {
        vec![0.0]
    } else {
        spec.s_list.clone()
    }
}

fn band_edge(u: &Field) -> f64 {
    let grid = u.grid();
    let cut = grid.dxi() * grid.n() as f64 / 3.0;
    let spec = u.spectrum();
    let peak = spec.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    (0..grid.n())
        .filter(|&k| {
            let xi = grid.wavenumber(k).abs();
            xi >= 0.9 * cut && xi < cut
        })
        .map(|k| spec[k].norm())
        .fold(0.0, f64::max)
        / peak
}

fn run_level(spec: &ExperimentSpec, grid: &Grid) -> Result<LevelRun> {
    let u0 = make_data(&spec.data, grid)?;
    let times = spec.times();
    let t_end = *times.last().expect("at least one time");
    let cfg = SolverConfig::new(grid, spec.dt, t_end, spec.sign)?;
    let dt = cfg.dt();
    let wanted: Vec<usize> = times.iter().map(|t| (t / dt).round() as usize).collect();
    let every = wanted.iter().fold(0, |g, &k| gcd(g, k)).max(1);
    let cfg = cfg.with_snapshot_every(every);
    let s_list = s_values(spec);
    let outer = 0.75 * grid.half_length();
    let mut samples = Vec::new();
    let result = run_with(&cfg, &u0, |snap| {
        if !wanted.contains(&snap.step) {
            return Ok(());
        }
        let u = &snap.field;
        let total = u.l2_norm_sq();
        let tail_fraction = if total > 0.0 {
            (total - u.l2_norm_sq_within(outer)) / total
        } else {
            0.0
        };
        let band_edge = band_edge(u);
        let sup = u.sup_norm();
        let noise = spec
            .r_list
            .iter()
            .map(|&r| {
                let w: f64 = grid.points().iter().map(|x| (1.0 + x * x).powf(r)).sum();
                (SAMPLE_NOISE * sup).powi(2) * w * grid.dx()
            })
            .collect();
        let mut norms = Vec::with_capacity(s_list.len() * spec.r_list.len());
        for &s in &s_list {
            for &r in &spec.r_list {
                let mut rec = z_norm(u, s, r, WeightKind::Exact)?;
                rec.t = snap.t;
                norms.push(rec);
            }
        }
        samples.push(LevelSample {
            t: snap.t,
            mean_mode: u.mean_mode(),
            l2: total.sqrt(),
            tail_fraction,
            tail_ok: snap.t == 0.0 || tail_fraction <= TAIL_BUDGET,
            band_edge,
            resolved: snap.t == 0.0 || band_edge <= BAND_EDGE_BUDGET,
            noise,
            norms,
        });
        Ok(())
    });
    let aborted_at = match result {
        Ok(_) => None,
        Err(LabError::BlowUp { last_valid_time, .. }) => Some(last_valid_time),
        Err(e) => return Err(e),
    };
    Ok(LevelRun {
        n: grid.n(),
        half_length: grid.half_length(),
        samples,
        aborted_at,
    })
}

/// Runs every ladder level, in parallel, and classifies each `(s, r)` pair.
pub fn run_persistence(spec: &ExperimentSpec) -> Result<PersistenceReport> {
    spec.validate()?;
    let grids = spec.ladder.grids()?;
    let levels = grids
        .par_iter()
        .map(|g| run_level(spec, g))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(spec, levels))
}

fn assemble(spec: &ExperimentSpec, levels: Vec<LevelRun>) -> PersistenceReport {
    let times = spec.times();
    let s_list = s_values(spec);
    let nr = spec.r_list.len();
    let mut pairs = Vec::new();
    for (si, &s) in s_list.iter().enumerate() {
        for (ri, &r) in spec.r_list.iter().enumerate() {
            let idx = si * nr + ri;
            let series: Vec<TimeVerdict> = times
                .iter()
                .enumerate()
                .map(|(ti, &t)| {
                    let at: Vec<&LevelSample> = levels.iter().filter_map(|l| l.samples.get(ti)).collect();
                    let weighted: Vec<f64> = at.iter().map(|x| x.norms[idx].weighted.powi(2)).collect();
                    let z = at.iter().map(|x| x.norms[idx].z).collect();
                    let tails_ok = at.iter().all(|x| x.tail_ok);
                    let resolved = at.iter().all(|x| x.resolved);
                    let noise = at.iter().map(|x| x.noise[ri]).fold(0.0, f64::max);
                    let ladder = classify_ladder(&weighted, noise);
                    let complete = at.len() == levels.len();
                    let verdict = if complete && tails_ok && resolved {
                        ladder.verdict
                    } else {
                        Verdict::Inconclusive
                    };
                    TimeVerdict { t, z, ladder, tails_ok, resolved, verdict }
                })
                .collect();
            let verdict = combine(series.iter().map(|v| v.verdict));
            pairs.push(PairReport { s, r, regime: Regime::of(r), series, verdict });
        }
    }
    let initial = levels
        .first()
        .and_then(|l| l.samples.first())
        .map_or(0.0, |x| x.mean_mode);
    let max_deviation = levels
        .iter()
        .flat_map(|l| l.samples.iter())
        .map(|x| (x.mean_mode - initial).abs())
        .fold(0.0, f64::max);
    let norm0 = levels.first().and_then(|l| l.samples.first()).map_or(0.0, |x| x.l2);
    let mean_zero = initial.abs() <= 1e-12 * norm0;
    let high_weight_only_mean_zero = mean_zero
        || !pairs
            .iter()
            .any(|p| p.r >= 2.5 && p.verdict == Verdict::Persists);
    PersistenceReport {
        spec: spec.clone(),
        levels,
        pairs,
        mean_zero: MeanZeroStatus { initial, max_deviation, mean_zero },
        high_weight_only_mean_zero,
    }
}
