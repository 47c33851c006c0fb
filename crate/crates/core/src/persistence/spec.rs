use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::solver::DispersionSign;
use crate::spectral::Grid;

use super::data::DataFamily;

/// Boxes `L_k = base * factor^k` at a common spacing `dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderSpec {
    pub dx: f64,
    pub base_half_length: f64,
    pub factor: f64,
    pub levels: usize,
}

impl Default for LadderSpec {
    fn default() -> Self {
        LadderSpec {
            dx: 0.0625,
            base_half_length: 32.0,
            factor: 4.0,
            levels: 3,
        }
    }
}

impl LadderSpec {
    pub fn grids(&self) -> Result<Vec<Grid>> {
        (0..self.levels)
            .map(|k| Grid::with_spacing(self.base_half_length * self.factor.powi(k as i32), self.dx))
            .collect()
    }
}

/// Which part of the persistence theory a weight exponent falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `r < 5/2`: any data.
    Unrestricted,
    /// `5/2 <= r < 7/2`: needs mean-zero data.
    MeanZero,
    /// `r >= 7/2`: persistence at three times forces `u = 0`.
    Forbidden,
}

impl Regime {
    pub fn of(r: f64) -> Self {
        if r < 2.5 {
            Regime::Unrestricted
        } else if r < 3.5 {
            Regime::MeanZero
        } else {
            Regime::Forbidden
        }
    }
}

/// A persistence experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub data: DataFamily,
    pub r_list: Vec<f64>,
    #[serde(default)]
    pub s_list: Vec<f64>,
    pub theta: f64,
    pub t_window: [f64; 2],
    /// Number of sampled times in the window, endpoints included.
    pub samples: usize,
    pub ladder: LadderSpec,
    pub dt: f64,
    pub sign: DispersionSign,
}

impl ExperimentSpec {
    /// Gaussian data at the reference ladder, probing `t in [0, 1]`.
    pub fn reference(data: DataFamily, r_list: Vec<f64>) -> Self {
        ExperimentSpec {
            data,
            r_list,
            s_list: vec![0.0, 2.0],
            theta: 0.3,
            t_window: [0.0, 1.0],
            samples: 5,
            ladder: LadderSpec::default(),
            dt: 1e-3,
            sign: DispersionSign::Plus,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let refuse = |reason: String| Err(LabError::precondition("ExperimentSpec", reason));
        if self.r_list.is_empty() {
            return refuse("empty r-list".into());
        }
        if let Some(r) = self.r_list.iter().find(|r| !(0.0..=4.0).contains(*r)) {
            return refuse(format!("r = {r} outside [0, 4]"));
        }
        if let Some(s) = self.s_list.iter().find(|s| !(0.0..=5.0).contains(*s)) {
            return refuse(format!("s = {s} outside [0, 5]"));
        }
        if !(self.theta > 0.0 && self.theta <= 0.5) {
            return refuse(format!("theta = {} outside (0, 1/2]", self.theta));
        }
        let [t1, t2] = self.t_window;
        if !(t1 >= 0.0 && t2 >= t1) {
            return refuse(format!("time window [{t1}, {t2}]"));
        }
        if self.samples < 2 && t2 > t1 {
            return refuse("need at least two sampled times".into());
        }
        if self.ladder.levels < 3 {
            return refuse(format!("ladder has {} levels, need at least 3", self.ladder.levels));
        }
        if self.ladder.factor.is_nan() || self.ladder.factor <= 1.0 {
            return refuse(format!("ladder factor {} must exceed 1", self.ladder.factor));
        }
        self.ladder.grids()?;
        Ok(())
    }

    /// Sampled times, evenly spaced over the window.
    pub fn times(&self) -> Vec<f64> {
        let [t1, t2] = self.t_window;
        if self.samples < 2 || t2 == t1 {
            return vec![t2];
        }
        (0..self.samples)
            .map(|i| t1 + (t2 - t1) * i as f64 / (self.samples - 1) as f64)
            .collect()
    }
}
