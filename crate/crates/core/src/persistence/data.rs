use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::solver::{soliton, Polarity};
use crate::spectral::{derivative, Complex64, Field, Grid};

/// Initial-data families with known spatial tails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum DataFamily {
    /// `a exp(-((x - x0) / w)^2)`; tail after evolution `~ |x|^-3`.
    Gaussian { amplitude: f64, center: f64, width: f64 },
    /// Derivative of the Gaussian above; exactly mean-zero, tail `~ |x|^-4`.
    Dipole { amplitude: f64, center: f64, width: f64 },
    /// `± c eta(c (x - x0))`; tail `~ 4 / (c x^2)`.
    Soliton { c: f64, center: f64, positive: bool },
    /// `u_hat(xi) = exp(-xi^2) |xi|^gamma`; mean-zero, tail `~ |x|^(-1-gamma)`.
    FourierCusp { gamma: f64 },
}

impl DataFamily {
    pub fn gaussian() -> Self {
        DataFamily::Gaussian { amplitude: 1.0, center: 0.0, width: 1.0 }
    }

    pub fn dipole() -> Self {
        DataFamily::Dipole { amplitude: 1.0, center: 0.0, width: 1.0 }
    }

    pub fn soliton() -> Self {
        DataFamily::Soliton { c: 1.0, center: 0.0, positive: false }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DataFamily::Gaussian { .. } => "gaussian",
            DataFamily::Dipole { .. } => "dipole",
            DataFamily::Soliton { .. } => "soliton",
            DataFamily::FourierCusp { .. } => "fourier-cusp",
        }
    }

    /// True when the family is mean-zero by construction.
    pub fn is_mean_zero(&self) -> bool {
        matches!(self, DataFamily::Dipole { .. } | DataFamily::FourierCusp { .. })
    }

    fn validate(&self) -> Result<()> {
        let bad = |reason: String| Err(LabError::precondition("make_data", reason));
        match *self {
            DataFamily::Gaussian { amplitude, width, .. } | DataFamily::Dipole { amplitude, width, .. } => {
                if width.is_nan() || width <= 0.0 || !amplitude.is_finite() {
                    return bad(format!("width {width} must be positive, amplitude {amplitude} finite"));
                }
            }
            DataFamily::Soliton { c, .. } => {
                if c.is_nan() || c <= 0.0 {
                    return bad(format!("soliton speed {c} must be positive"));
                }
            }
            DataFamily::FourierCusp { gamma } => {
                if !(gamma > 0.0 && gamma <= 4.0) {
                    return bad(format!("cusp exponent {gamma} outside (0, 4]"));
                }
            }
        }
        Ok(())
    }
}

/// Samples the family on a grid.
pub fn make_data(family: &DataFamily, grid: &Grid) -> Result<Field> {
    family.validate()?;
    Ok(match *family {
        DataFamily::Gaussian { amplitude, center, width } => {
            Field::from_fn(grid, |x| amplitude * (-((x - center) / width).powi(2)).exp())
        }
        DataFamily::Dipole { amplitude, center, width } => {
            let g = Field::from_fn(grid, |x| amplitude * (-((x - center) / width).powi(2)).exp());
            derivative(&g, 1)
        }
        DataFamily::Soliton { c, center, positive } => {
            let p = if positive { Polarity::Positive } else { Polarity::Negative };
            soliton(c, center, grid, p)?
        }
        DataFamily::FourierCusp { gamma } => {
            let dx = grid.dx();
            let spec = (0..grid.n())
                .map(|k| {
                    let xi = grid.wavenumber(k);
                    // the grid starts at x = -L, so centring at 0 costs (-1)^mode
                    let phase = if grid.mode(k) % 2 == 0 { 1.0 } else { -1.0 };
                    Complex64::new(phase * (-xi * xi).exp() * xi.abs().powf(gamma) / dx, 0.0)
                })
                .collect();
            Field::from_spectrum(grid, spec)?
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{weighted_norm, WeightKind};

    #[test]
    fn dipole_is_exactly_mean_zero() {
        let g = Grid::new(1024, 32.0).unwrap();
        let u = make_data(&DataFamily::dipole(), &g).unwrap();
        assert!(u.mean_mode().abs() < 1e-15);
    }

    #[test]
    fn cusp_spectrum_round_trips() {
        let g = Grid::new(16384, 1024.0).unwrap();
        let gamma = 0.7;
        let u = make_data(&DataFamily::FourierCusp { gamma }, &g).unwrap();
        assert!(u.mean_mode().abs() < 1e-15);
        for k in [1usize, 7, 40] {
            let xi = g.wavenumber(k);
            let phase = if k % 2 == 0 { 1.0 } else { -1.0 };
            let got = phase * u.spectrum()[k].re * g.dx();
            assert!((got - (-xi * xi).exp() * xi.powf(gamma)).abs() < 1e-13);
        }
        // tail ~ |x|^(-1-gamma): doubling x divides |u| by about 2^1.7
        let at = |x: f64| u.samples()[((x + 1024.0) / g.dx()).round() as usize].abs();
        let ratio = at(16.0) / at(32.0);
        assert!((ratio.log2() - 1.7).abs() < 0.05, "{}", ratio.log2());
    }

    #[test]
    fn soliton_weighted_norm_threshold() {
        let family = DataFamily::soliton();
        let norm = |l: f64, r: f64| {
            let g = Grid::with_spacing(l, 0.125).unwrap();
            weighted_norm(&make_data(&family, &g).unwrap(), r, WeightKind::Exact).unwrap().powi(2)
        };
        for (r, converges) in [(1.4, true), (1.6, false)] {
            let (a, b, c) = (norm(32.0, r), norm(128.0, r), norm(512.0, r));
            let rho = (c - b) / (b - a);
            assert_eq!(rho < 0.9, converges, "r={r}: rho={rho}");
        }
    }

    #[test]
    fn invalid_parameters_are_refused() {
        let g = Grid::new(256, 16.0).unwrap();
        let bad = DataFamily::Gaussian { amplitude: 1.0, center: 0.0, width: 0.0 };
        assert!(make_data(&bad, &g).unwrap_err().is_refusal());
        assert!(make_data(&DataFamily::FourierCusp { gamma: -1.0 }, &g).is_err());
    }
}
