use std::f64::consts::PI;

use bolab::fracops::{
    calderon_ratio, commutator_ratio_by_eta, commutator_ratio_by_f, general_argument_check,
    halfderiv_weight_bound, leibniz_ratio, quadrature_vs_spectral, random_band_limited, random_dipole,
    random_gaussian_mixture, run_ensemble, smoothing_ratio, Cap, ChaCha8Rng, EnsembleLaw, HalfDerivBound,
    IdentityOperators, LeibnizKind, Profile, RatioEnsemble, AFFINE_TOL,
};
use bolab::spectral::Grid;
use bolab::weights::TruncatedWeight;
use serde::{Deserialize, Serialize};

use super::{relative_spread, SuiteOutput};
use crate::error::Result;
use crate::output::{GridParams, OutputDir};
use crate::Check;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CommutatorsConfig {
    pub affine_n: usize,
    pub affine_half_length: f64,
    pub affine_trials: usize,
    /// Caps `N` of the curved weight `<x>_N^e x`; the box is `L = box_factor N`.
    pub caps: Vec<f64>,
    pub weight_exponent: f64,
    pub dx: f64,
    pub box_factor: f64,
    pub trials: usize,
    pub drift_tol: f64,
    pub halfderiv_exponent: f64,
    pub halfderiv_caps: Vec<f64>,
    pub halfderiv_tol: f64,
    pub halfderiv_refused: f64,
    pub ensembles: bool,
    pub ensemble_n: usize,
    pub ensemble_half_length: f64,
    pub ensemble_trials: usize,
}

impl Default for CommutatorsConfig {
    fn default() -> Self {
        CommutatorsConfig {
            affine_n: 4096,
            affine_half_length: 128.0,
            affine_trials: 20,
            caps: vec![16.0, 32.0, 64.0, 128.0, 256.0],
            weight_exponent: 0.8,
            dx: 0.0625,
            box_factor: 8.0,
            trials: 100,
            drift_tol: 0.1,
            halfderiv_exponent: 0.3,
            halfderiv_caps: vec![16.0, 64.0, 256.0, 1024.0],
            halfderiv_tol: 0.05,
            halfderiv_refused: 0.6,
            ensembles: true,
            ensemble_n: 2048,
            ensemble_half_length: 64.0,
            ensemble_trials: 100,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvedRow {
    pub cap: f64,
    pub half_length: f64,
    pub n: usize,
    pub trials: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HalfDerivRow {
    pub a: f64,
    pub cap: Option<f64>,
    pub sup: f64,
    pub argsup: f64,
}

impl From<&HalfDerivBound> for HalfDerivRow {
    fn from(b: &HalfDerivBound) -> Self {
        HalfDerivRow {
            a: b.a,
            cap: match b.cap {
                Cap::Finite(n) => Some(n),
                Cap::Infinite => None,
            },
            sup: b.sup,
            argsup: b.argsup,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleRow {
    pub inequality: String,
    pub n: usize,
    pub half_length: f64,
    pub trials: usize,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutatorsReport {
    pub affine_max_ratio: f64,
    pub curved: Vec<CurvedRow>,
    pub curved_drift: f64,
    pub halfderiv: Vec<HalfDerivRow>,
    pub halfderiv_variation: f64,
    pub halfderiv_refusal: String,
    pub ensembles: Vec<EnsembleRow>,
    pub checks: Vec<Check>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Max ratio of `|M0| / (||phi''|| ||v||^2)` over dipole mixtures for `phi = <x>_N^e x`.
pub fn curved_general_argument(cfg: &CommutatorsConfig, cap: f64, seed: u64) -> Result<CurvedRow> {
    let grid = Grid::with_spacing(cfg.box_factor * cap, cfg.dx)?;
    let ops = IdentityOperators::new(&grid);
    let phi = Profile::truncated_times_x(TruncatedWeight::new(cap, cfg.weight_exponent)?);
    let ens = run_ensemble("general-argument", seed, cfg.trials, |rng| {
        Ok(general_argument_check(&ops, &random_dipole(&grid, rng), &phi)?.ratio)
    })?;
    Ok(CurvedRow {
        cap,
        half_length: grid.half_length(),
        n: grid.n(),
        trials: cfg.trials,
        max_ratio: ens.max_ratio,
        mean_ratio: mean(&ens.ratios),
    })
}

/// Inequality ensembles measured at `n` and `2n` and at `T` and `2T` trials.
fn inequality_ensembles(cfg: &CommutatorsConfig, seed: u64) -> Result<(Vec<EnsembleRow>, Vec<Check>)> {
    let law = EnsembleLaw::default();
    let coarse = Grid::new(cfg.ensemble_n, cfg.ensemble_half_length)?;
    let fine = coarse.refined()?;
    // sin must be periodic on the box
    let periodic = Grid::new(cfg.ensemble_n, 20.0 * PI)?;
    let tanh = Profile::tanh();
    let bracket = Profile::bracket_pow(0.4);
    let sin = Profile::sin();
    type Trial<'a> = Box<dyn Fn(&Grid, &mut ChaCha8Rng) -> bolab::Result<f64> + Sync + 'a>;
    let cases: Vec<(&str, Grid, Trial)> = vec![
        (
            "calderon j=1 k=0 tanh",
            coarse.clone(),
            Box::new(|g, rng| calderon_ratio(&tanh, &random_band_limited(g, &law, rng), 1, 0)),
        ),
        (
            "smoothing a=b=1/2 <x>^0.4",
            coarse.clone(),
            Box::new(|g, rng| smoothing_ratio(0.5, 0.5, &bracket, &random_gaussian_mixture(g, rng))),
        ),
        (
            "commutator by D^1/2 eta, sin",
            periodic.clone(),
            Box::new(|g, rng| commutator_ratio_by_eta(0.5, &sin, &random_band_limited(g, &law, rng))),
        ),
        (
            "commutator by D^1/2 f, tanh",
            coarse.clone(),
            Box::new(|g, rng| commutator_ratio_by_f(0.5, &tanh, &random_band_limited(g, &law, rng))),
        ),
        (
            "leibniz J^1.7 mixtures",
            coarse.clone(),
            Box::new(|g, rng| {
                let f = random_gaussian_mixture(g, rng);
                leibniz_ratio(1.7, LeibnizKind::Bessel, &f, &random_gaussian_mixture(g, rng))
            }),
        ),
        (
            "leibniz D^0.5 mixtures",
            coarse.clone(),
            Box::new(|g, rng| {
                let f = random_gaussian_mixture(g, rng);
                leibniz_ratio(0.5, LeibnizKind::Homogeneous, &f, &random_gaussian_mixture(g, rng))
            }),
        ),
    ];
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let t = cfg.ensemble_trials;
    for (name, grid, trial) in &cases {
        let refined = if grid.half_length() == coarse.half_length() { fine.clone() } else { grid.refined()? };
        let run = |g: &Grid, trials: usize| -> Result<RatioEnsemble> {
            Ok(run_ensemble(name, seed, trials, |rng| trial(g, rng))?)
        };
        let base = run(grid, t)?;
        let doubled = run(grid, 2 * t)?;
        let finer = run(&refined, t)?;
        for (g, e) in [(grid, &base), (grid, &doubled), (&refined, &finer)] {
            rows.push(EnsembleRow {
                inequality: name.to_string(),
                n: g.n(),
                half_length: g.half_length(),
                trials: e.trials,
                max_ratio: e.max_ratio,
            });
        }
        let (dt, dn) = (base.drift(&doubled), base.drift(&finer));
        checks.push(Check::new(
            format!("ensemble {name}"),
            base.max_ratio.is_finite() && dt < 0.1 && dn < 0.1,
            format!("max ratio {:.4}, trial doubling {dt:.1e}, n doubling {dn:.1e}", base.max_ratio),
        ));
    }
    Ok((rows, checks))
}

pub fn run(cfg: &CommutatorsConfig, seed: u64, out: &mut OutputDir) -> Result<SuiteOutput> {
    let mut grids: Vec<GridParams> = Vec::new();

    let affine_grid = Grid::new(cfg.affine_n, cfg.affine_half_length)?;
    grids.push((&affine_grid).into());
    let ops = IdentityOperators::new(&affine_grid);
    let line = Profile::linear();
    let law = EnsembleLaw::default();
    let affine = run_ensemble("general-argument-affine", seed, cfg.affine_trials, |rng| {
        Ok(general_argument_check(&ops, &random_band_limited(&affine_grid, &law, rng), &line)?.ratio)
    })?;

    let curved: Vec<CurvedRow> =
        cfg.caps.iter().map(|&n| curved_general_argument(cfg, n, seed)).collect::<Result<_>>()?;
    for c in &curved {
        grids.push(GridParams { n: c.n, half_length: c.half_length, dx: cfg.dx });
    }
    let maxes: Vec<f64> = curved.iter().map(|c| c.max_ratio).collect();
    let curved_drift = relative_spread(&maxes);

    let a = cfg.halfderiv_exponent;
    let mut bounds: Vec<HalfDerivBound> =
        cfg.halfderiv_caps.iter().map(|&n| halfderiv_weight_bound(a, Cap::Finite(n))).collect::<bolab::Result<_>>()?;
    let sups: Vec<f64> = bounds.iter().map(|b| b.sup).collect();
    let variation = relative_spread(&sups);
    let infinite = halfderiv_weight_bound(a, Cap::Infinite)?;
    let near_half = halfderiv_weight_bound(0.49, Cap::Infinite)?;
    let agreement_grid = Grid::new(2048, 128.0)?;
    let agreement = quadrature_vs_spectral(a, 16.0, &agreement_grid, 48.0)?;
    let refusal = halfderiv_weight_bound(cfg.halfderiv_refused, Cap::Finite(16.0));
    let refused = matches!(&refusal, Err(e) if e.is_refusal());
    let refusal_text = match &refusal {
        Err(e) => e.to_string(),
        Ok(b) => format!("accepted, sup {}", b.sup),
    };
    bounds.push(infinite.clone());
    bounds.push(near_half.clone());

    let mut checks = vec![
        Check::new(
            "General Argument",
            affine.max_ratio <= AFFINE_TOL && curved_drift < cfg.drift_tol,
            format!(
                "affine max |M0|/|v|^2 {:.1e}; curved max ratio {} over N = {:?}, drift {:.1}%",
                affine.max_ratio,
                maxes.iter().map(|m| format!("{m:.4}")).collect::<Vec<_>>().join(", "),
                cfg.caps,
                100.0 * curved_drift
            ),
        ),
        Check::new(
            "D^1/2 weight bound uniformity",
            variation <= cfg.halfderiv_tol && refused,
            format!(
                "a = {a}: sup {} over N = {:?} (untruncated {:.4}), variation {:.1}% vs {:.0}%; a = {} {}",
                sups.iter().map(|s| format!("{s:.4}")).collect::<Vec<_>>().join(", "),
                cfg.halfderiv_caps,
                infinite.sup,
                100.0 * variation,
                100.0 * cfg.halfderiv_tol,
                cfg.halfderiv_refused,
                if refused { "refused" } else { "not refused" },
            ),
        ),
        Check::new(
            "D^1/2 exponent monotonicity",
            near_half.sup > infinite.sup,
            format!("sup at a = 0.49: {:.4} > a = {a}: {:.4}", near_half.sup, infinite.sup),
        ),
        Check::new(
            "D^1/2 quadrature vs spectral",
            agreement <= 1e-6,
            format!("max gap {agreement:.1e} on |x| <= 48 (N = 16, L = 128, n = 2048)"),
        ),
    ];

    let (ensembles, ensemble_checks) = if cfg.ensembles { inequality_ensembles(cfg, seed)? } else { (vec![], vec![]) };
    checks.extend(ensemble_checks);

    let halfderiv: Vec<HalfDerivRow> = bounds.iter().map(Into::into).collect();
    let report = CommutatorsReport {
        affine_max_ratio: affine.max_ratio,
        curved: curved.clone(),
        curved_drift,
        halfderiv: halfderiv.clone(),
        halfderiv_variation: variation,
        halfderiv_refusal: refusal_text,
        ensembles: ensembles.clone(),
        checks: checks.clone(),
    };
    out.write_json("commutators.json", &report)?;
    out.write_csv("general_argument.csv", &curved)?;
    out.write_csv("halfderiv_bounds.csv", &halfderiv)?;
    out.write_csv("ensembles.csv", &ensembles)?;
    Ok(SuiteOutput { checks, timings: vec![], grids, convention: None, steps: 0 })
}
