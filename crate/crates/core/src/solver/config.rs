use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::spectral::Grid;

/// Default `C_stab` in the ceiling `dt <= C_stab / xi_max^2`.
pub const DEFAULT_C_STAB: f64 = 20.0;

/// Sign `sigma` in `u_t + sigma H u_xx + u u_x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DispersionSign {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl DispersionSign {
    pub fn value(self) -> f64 {
        match self {
            DispersionSign::Plus => 1.0,
            DispersionSign::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            DispersionSign::Plus => DispersionSign::Minus,
            DispersionSign::Minus => DispersionSign::Plus,
        }
    }
}

impl fmt::Display for DispersionSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DispersionSign::Plus => "+1",
            DispersionSign::Minus => "-1",
        })
    }
}

impl FromStr for DispersionSign {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+1" | "1" | "+" => Ok(DispersionSign::Plus),
            "-1" | "-" => Ok(DispersionSign::Minus),
            other => Err(LabError::input("DispersionSign", format!("expected +1 or -1, got {other:?}"))),
        }
    }
}

/// Time-stepping parameters for one run. The integrator is always the
/// integrating-factor RK4 with 2/3 de-aliasing.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    grid: Grid,
    dt: f64,
    steps: usize,
    sign: DispersionSign,
    nonlinear: bool,
    snapshot_every: usize,
    c_stab: f64,
}

/// Serializable view of a [`SolverConfig`].
#[derive(Debug, Clone, Serialize)]
pub struct ConfigRecord {
    pub n: usize,
    pub half_length: f64,
    pub dt: f64,
    pub t_end: f64,
    pub steps: usize,
    pub integrator: &'static str,
    pub dealias: &'static str,
    pub dispersion_sign: DispersionSign,
    pub nonlinear: bool,
    pub snapshot_every: usize,
    pub c_stab: f64,
}

impl SolverConfig {
    /// `dt` is shrunk so that a whole number of steps lands on `t_end`.
    pub fn new(grid: &Grid, dt: f64, t_end: f64, sign: DispersionSign) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) || !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(LabError::input("SolverConfig", format!("dt = {dt}, t_end = {t_end}")));
        }
        let steps = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
        let dt = if steps == 0 { dt } else { t_end / steps as f64 };
        let cfg = SolverConfig {
            grid: grid.clone(),
            dt,
            steps,
            sign,
            nonlinear: true,
            snapshot_every: steps.max(1),
            c_stab: DEFAULT_C_STAB,
        };
        cfg.check_stability()?;
        Ok(cfg)
    }

    pub fn linear(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn with_snapshot_every(mut self, steps: usize) -> Self {
        self.snapshot_every = steps.max(1);
        self
    }

    pub fn with_c_stab(mut self, c_stab: f64) -> Result<Self> {
        self.c_stab = c_stab;
        self.check_stability()?;
        Ok(self)
    }

    fn check_stability(&self) -> Result<()> {
        let ceiling = self.c_stab / self.grid.xi_max().powi(2);
        if self.dt > ceiling {
            return Err(LabError::precondition(
                "SolverConfig",
                format!("dt = {} exceeds the ceiling {ceiling:e}", self.dt),
            ));
        }
        Ok(())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn t_end(&self) -> f64 {
        self.dt * self.steps as f64
    }

    pub fn sign(&self) -> DispersionSign {
        self.sign
    }

    pub fn is_nonlinear(&self) -> bool {
        self.nonlinear
    }

    pub fn snapshot_every(&self) -> usize {
        self.snapshot_every
    }

    pub fn record(&self) -> ConfigRecord {
        ConfigRecord {
            n: self.grid.n(),
            half_length: self.grid.half_length(),
            dt: self.dt,
            t_end: self.t_end(),
            steps: self.steps,
            integrator: "IFRK4",
            dealias: "2/3",
            dispersion_sign: self.sign,
            nonlinear: self.nonlinear,
            snapshot_every: self.snapshot_every,
            c_stab: self.c_stab,
        }
    }
}
