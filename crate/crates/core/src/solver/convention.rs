use serde::Serialize;

use crate::error::Result;
use crate::spectral::Grid;

use super::config::{DispersionSign, SolverConfig};
use super::run::run;
use super::soliton::{peak_location, soliton, Polarity};

/// Relative `L^2` shape error accepted for a travelling soliton.
pub const SHAPE_TOL: f64 = 1e-3;
/// Peak displacement tolerance in grid spacings.
pub const PEAK_TOL_DX: f64 = 2.0;

/// One `(sigma, polarity, direction)` hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Candidate {
    pub sign: DispersionSign,
    pub positive: bool,
    /// +1 rightward, -1 leftward.
    pub direction: f64,
}

impl Candidate {
    pub const ORDER: [Candidate; 3] = [
        Candidate { sign: DispersionSign::Plus, positive: true, direction: 1.0 },
        Candidate { sign: DispersionSign::Plus, positive: false, direction: -1.0 },
        Candidate { sign: DispersionSign::Minus, positive: true, direction: 1.0 },
    ];

    fn polarity(&self) -> Polarity {
        if self.positive {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CandidateResult {
    pub candidate: Candidate,
    pub shape_error: f64,
    pub peak_shift: f64,
    pub expected_shift: f64,
    pub pass: bool,
}

/// Results for all candidates and the first that propagates unchanged.
#[derive(Debug, Clone, Serialize)]
pub struct ConventionVerdict {
    pub c: f64,
    pub t_end: f64,
    pub n: usize,
    pub half_length: f64,
    pub results: Vec<CandidateResult>,
    pub chosen: Option<Candidate>,
}

impl ConventionVerdict {
    pub fn pinned_sign(&self) -> Option<DispersionSign> {
        self.chosen.map(|c| c.sign)
    }
}

/// Evolves `±eta_c` from the origin to `t_end` under each candidate and
/// compares with the exact translate.
pub fn test_candidate(grid: &Grid, c: f64, t_end: f64, dt: f64, cand: Candidate) -> Result<CandidateResult> {
    let u0 = soliton(c, 0.0, grid, cand.polarity())?;
    let cfg = SolverConfig::new(grid, dt, t_end, cand.sign)?;
    let out = run(&cfg, &u0)?;
    let expected_shift = cand.direction * c * cfg.t_end();
    let reference = soliton(c, expected_shift, grid, cand.polarity())?;
    let shape_error = out.final_state.sub(&reference).l2_norm() / reference.l2_norm();
    let peak_shift = peak_location(&out.final_state);
    let pass = shape_error <= SHAPE_TOL
        && (peak_shift - expected_shift).abs() <= PEAK_TOL_DX * grid.dx();
    Ok(CandidateResult {
        candidate: cand,
        shape_error,
        peak_shift,
        expected_shift,
        pass,
    })
}

pub fn resolve_convention(grid: &Grid, c: f64, t_end: f64, dt: f64) -> Result<ConventionVerdict> {
    let results = Candidate::ORDER
        .iter()
        .map(|&cand| test_candidate(grid, c, t_end, dt, cand))
        .collect::<Result<Vec<_>>>()?;
    let chosen = results.iter().find(|r| r.pass).map(|r| r.candidate);
    Ok(ConventionVerdict {
        c,
        t_end,
        n: grid.n(),
        half_length: grid.half_length(),
        results,
        chosen,
    })
}
