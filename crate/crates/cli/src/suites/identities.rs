use std::time::Instant;

use bolab::fracops::{check_identity, IdentityId, IdentityOperators, IdentityReport, KAPPA};
use bolab::persistence::{make_data, DataFamily};
use bolab::spectral::{hilbert, Field, Grid, HomogeneousSymbol, LineOperator};
use serde::{Deserialize, Serialize};

use super::{timing, SuiteOutput};
use crate::error::Result;
use crate::output::OutputDir;
use crate::{describe, Check};

/// Tolerance on the fitted commutator constant per unit mass.
pub const KAPPA_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityCase {
    pub identity: IdentityId,
    pub data: DataFamily,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IdentitiesConfig {
    pub n: usize,
    pub half_length: f64,
    pub cases: Vec<IdentityCase>,
    /// Profiles with nonzero mass for the commutator constant fit.
    pub mass_profiles: Vec<DataFamily>,
    pub mean_zero_profiles: Vec<DataFamily>,
    pub oracle_lengths: Vec<f64>,
    pub oracle_dx: f64,
    pub runtime_limit_s: f64,
}

impl Default for IdentitiesConfig {
    fn default() -> Self {
        let gauss = |amplitude, center, width| DataFamily::Gaussian { amplitude, center, width };
        let dipole = |amplitude, center, width| DataFamily::Dipole { amplitude, center, width };
        let mut cases = Vec::new();
        for identity in [IdentityId::Id1, IdentityId::Id2, IdentityId::Id4, IdentityId::Id1b, IdentityId::Id1c] {
            for width in [1.0, 2.0] {
                cases.push(IdentityCase { identity, data: gauss(1.0, 0.0, width) });
            }
        }
        for width in [1.0, 2.0] {
            cases.push(IdentityCase { identity: IdentityId::Id3, data: dipole(1.0, 0.0, width) });
        }
        IdentitiesConfig {
            n: 4096,
            half_length: 128.0,
            cases,
            mass_profiles: vec![
                gauss(1.0, 0.0, 1.0),
                gauss(2.0, 1.5, 0.7),
                gauss(-0.5, -3.0, 2.0),
                gauss(0.3, 4.0, 3.0),
                gauss(5.0, -1.0, 0.5),
            ],
            mean_zero_profiles: vec![dipole(1.0, 0.0, 1.0), dipole(2.0, 1.5, 0.7), dipole(-0.5, -3.0, 2.0)],
            oracle_lengths: vec![64.0, 128.0, 256.0],
            oracle_dx: 0.125,
            runtime_limit_s: 10.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityRow {
    pub identity: String,
    pub data: String,
    pub residual: f64,
    pub normalizer: f64,
    pub tolerance: f64,
    pub constant: Option<f64>,
    pub constant_ratio: Option<f64>,
    pub pass: bool,
}

impl IdentityRow {
    fn new(r: &IdentityReport) -> Self {
        IdentityRow {
            identity: r.identity_id.to_string(),
            data: r.input_descriptor.clone(),
            residual: r.residual_l2,
            normalizer: r.normalizer,
            tolerance: r.tolerance,
            constant: r.constant,
            constant_ratio: r.constant_ratio,
            pass: r.pass,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleRow {
    pub half_length: f64,
    pub n: usize,
    /// Line-corrected transform of the profile cut at `|x| <= L/4`, error on `|x| <= 3L/4`.
    pub line_error: f64,
    /// Plain periodic transform, error over the whole box.
    pub periodic_error: f64,
    pub periodic_sup_error: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Dichotomy {
    pub kappa: f64,
    pub kappa_fit: f64,
    /// Largest `|constant / f_hat(0) - kappa_fit|` over the mass profiles.
    pub max_deviation: f64,
    pub mean_zero_pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentitiesReport {
    pub n: usize,
    pub half_length: f64,
    pub identities: Vec<IdentityRow>,
    pub dichotomy: Dichotomy,
    pub oracle: Vec<OracleRow>,
    pub checks: Vec<Check>,
}

pub fn hilbert_oracle(half_length: f64, dx: f64) -> Result<OracleRow> {
    let g = Grid::with_spacing(half_length, dx)?;
    let exact = Field::from_fn(&g, |x| x / (1.0 + x * x));
    let h = LineOperator::new(&g, HomogeneousSymbol::hilbert());
    let cut = Field::from_fn(&g, |x| if x.abs() <= half_length / 4.0 { 1.0 / (1.0 + x * x) } else { 0.0 });
    let line_error = h.apply(&cut)?.sub(&exact).l2_norm_sq_within(h.valid_radius()).sqrt();
    let periodic = hilbert(&Field::from_fn(&g, |x| 1.0 / (1.0 + x * x))).sub(&exact);
    let bound = 10.0 / half_length;
    Ok(OracleRow {
        half_length,
        n: g.n(),
        line_error,
        periodic_error: periodic.l2_norm(),
        periodic_sup_error: periodic.sup_norm(),
        bound,
        pass: line_error <= bound,
    })
}

/// Least-squares `kappa` from `constant = kappa * mass` over the profiles.
pub fn fit_kappa(pairs: &[(f64, f64)]) -> (f64, f64) {
    let num: f64 = pairs.iter().map(|(m, c)| m * c).sum();
    let den: f64 = pairs.iter().map(|(m, _)| m * m).sum();
    let fit = num / den;
    let dev = pairs.iter().map(|(m, c)| (c / m - fit).abs()).fold(0.0, f64::max);
    (fit, dev)
}

pub fn run(cfg: &IdentitiesConfig, out: &mut OutputDir) -> Result<SuiteOutput> {
    let clock = Instant::now();
    let grid = Grid::new(cfg.n, cfg.half_length)?;
    let ops = IdentityOperators::new(&grid);
    let check = |id: IdentityId, data: &DataFamily| -> Result<IdentityReport> {
        let f = make_data(data, &grid)?;
        Ok(check_identity(&ops, id, &f, &describe(data))?)
    };
    let identity_reports: Vec<IdentityReport> =
        cfg.cases.iter().map(|c| check(c.identity, &c.data)).collect::<Result<_>>()?;
    let identity_time = clock.elapsed();

    let massless: Vec<IdentityReport> =
        cfg.mean_zero_profiles.iter().map(|d| check(IdentityId::Id1d, d)).collect::<Result<_>>()?;
    let massive: Vec<IdentityReport> =
        cfg.mass_profiles.iter().map(|d| check(IdentityId::Id1d, d)).collect::<Result<_>>()?;
    let pairs: Vec<(f64, f64)> = cfg
        .mass_profiles
        .iter()
        .zip(&massive)
        .map(|(d, r)| Ok((make_data(d, &grid)?.mean_mode(), r.constant.unwrap_or(f64::NAN))))
        .collect::<Result<_>>()?;
    let (kappa_fit, max_deviation) = fit_kappa(&pairs);
    let dichotomy = Dichotomy {
        kappa: KAPPA,
        kappa_fit,
        max_deviation,
        mean_zero_pass: massless.iter().all(|r| r.pass),
    };

    let oracle: Vec<OracleRow> =
        cfg.oracle_lengths.iter().map(|&l| hilbert_oracle(l, cfg.oracle_dx)).collect::<Result<_>>()?;

    let worst = identity_reports
        .iter()
        .map(|r| r.residual_l2 / r.normalizer)
        .fold(0.0, f64::max);
    let mut checks = vec![
        Check::new(
            "identity suite",
            identity_reports.iter().all(|r| r.pass),
            format!("{} cases, worst residual/norm {worst:.2e}", identity_reports.len()),
        ),
        Check::new(
            "commutator dichotomy",
            dichotomy.mean_zero_pass
                && massive.len() >= 5
                && max_deviation <= KAPPA_TOL
                && (kappa_fit - KAPPA).abs() <= KAPPA_TOL,
            format!(
                "mean-zero constants {}, fitted kappa {kappa_fit:.12} (-1/pi {KAPPA:.12}), max deviation {max_deviation:.1e}",
                if dichotomy.mean_zero_pass { "vanish" } else { "do not vanish" },
            ),
        ),
    ];
    if !oracle.is_empty() {
        checks.push(Check::new(
            "Hilbert oracle",
            oracle.iter().all(|o| o.pass),
            oracle
                .iter()
                .map(|o| format!("L={}: {:.2e} <= {:.2e}", o.half_length, o.line_error, o.bound))
                .collect::<Vec<_>>()
                .join(", "),
        ));
    }

    let rows: Vec<IdentityRow> =
        identity_reports.iter().chain(&massless).chain(&massive).map(IdentityRow::new).collect();
    let report = IdentitiesReport {
        n: cfg.n,
        half_length: cfg.half_length,
        identities: rows.clone(),
        dichotomy,
        oracle: oracle.clone(),
        checks: checks.clone(),
    };
    out.write_json("identities.json", &report)?;
    out.write_csv("identities.csv", &rows)?;
    out.write_csv("hilbert_oracle.csv", &oracle)?;

    let mut grids = vec![(&grid).into()];
    for &l in &cfg.oracle_lengths {
        grids.push((&Grid::with_spacing(l, cfg.oracle_dx)?).into());
    }
    Ok(SuiteOutput {
        checks,
        timings: vec![timing("identity suite runtime", identity_time, cfg.runtime_limit_s)],
        grids,
        convention: None,
        steps: 0,
    })
}
