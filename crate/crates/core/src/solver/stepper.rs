use crate::error::{LabError, Result};
use crate::spectral::{Complex64, Field, Grid};

use super::config::SolverConfig;

/// Norm growth treated as overflow.
const OVERFLOW_FACTOR: f64 = 1e12;

/// Integrating-factor RK4 on the Fourier coefficients.
///
/// With `L = -sigma i xi |xi|` and `N(v) = -(i xi / 2) P(u^2)`, one step is
/// classical RK4 for `w = e^{-Lt} v`.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: Grid,
    dt: f64,
    nonlinear: bool,
    half: Vec<Complex64>,
    flux: Vec<Complex64>,
}

impl Stepper {
    pub fn new(cfg: &SolverConfig) -> Self {
        let grid = cfg.grid().clone();
        let dt = cfg.dt();
        let sigma = cfg.sign().value();
        let cut = grid.dxi() * grid.n() as f64 / 3.0;
        let half = grid
            .wavenumbers()
            .into_iter()
            .map(|xi| Complex64::new(0.0, -sigma * xi * xi.abs() * 0.5 * dt).exp())
            .collect();
        let flux = (0..grid.n())
            .map(|k| {
                let xi = grid.wavenumber(k);
                if k == grid.nyquist_index() || xi.abs() >= cut {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, -0.5 * xi)
                }
            })
            .collect();
        Stepper {
            grid,
            dt,
            nonlinear: cfg.is_nonlinear(),
            half,
            flux,
        }
    }

    /// Band-limits `u` to the de-aliased band, returning its coefficients.
    pub fn prepare(&self, u: &Field) -> Vec<Complex64> {
        let mut v = u.spectrum().to_vec();
        let cut = self.grid.dxi() * self.grid.n() as f64 / 3.0;
        for (k, c) in v.iter_mut().enumerate() {
            if k == self.grid.nyquist_index() || self.grid.wavenumber(k).abs() >= cut {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        v
    }

    fn rhs(&self, v: &[Complex64]) -> Vec<Complex64> {
        let dt = self.dt;
        if !self.nonlinear {
            return vec![Complex64::new(0.0, 0.0); v.len()];
        }
        let (u, _) = self.grid.inverse(v.to_vec());
        let sq: Vec<f64> = u.iter().map(|x| x * x).collect();
        let w = self.grid.forward(&sq);
        w.iter().zip(&self.flux).map(|(a, m)| a * m * dt).collect()
    }

    fn propagate(&self, v: &[Complex64]) -> Vec<Complex64> {
        v.iter().zip(&self.half).map(|(a, e)| a * e).collect()
    }

    /// One step of size `dt`.
    pub fn step(&self, v: &[Complex64]) -> Vec<Complex64> {
        let e = |x: &[Complex64]| self.propagate(x);
        let axpy = |x: &[Complex64], c: f64, y: &[Complex64]| -> Vec<Complex64> {
            x.iter().zip(y).map(|(a, b)| a + b * c).collect()
        };
        let k1 = self.rhs(v);
        let ev = e(v);
        let k2 = self.rhs(&e(&axpy(v, 0.5, &k1)));
        let k3 = self.rhs(&axpy(&ev, 0.5, &k2));
        let k4 = self.rhs(&axpy(&e(&ev), 1.0, &e(&k3)));
        let e2v = e(&ev);
        let e2k1 = e(&e(&k1));
        let ek23 = e(&axpy(&k2, 1.0, &k3));
        e2v.iter()
            .zip(&e2k1)
            .zip(&ek23)
            .zip(&k4)
            .map(|(((a, b), c), d)| a + (b + c * 2.0 + d) / 6.0)
            .collect()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
}

/// Squared coefficient norm, proportional to `||u||_2^2`.
pub(crate) fn coeff_norm_sq(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

pub(crate) fn check_finite(v: &[Complex64], t_prev: f64, base: f64) -> Result<()> {
    let n2 = coeff_norm_sq(v);
    if !n2.is_finite() {
        return Err(LabError::BlowUp {
            last_valid_time: t_prev,
            reason: "non-finite Fourier coefficients".into(),
        });
    }
    if base > 0.0 && n2 > OVERFLOW_FACTOR * OVERFLOW_FACTOR * base {
        return Err(LabError::BlowUp {
            last_valid_time: t_prev,
            reason: format!("L2 norm grew by more than {OVERFLOW_FACTOR:e}"),
        });
    }
    Ok(())
}
