use std::sync::OnceLock;

use rustfft::num_complex::Complex64;

use super::grid::Grid;
use crate::error::{LabError, Result};

/// Real samples on a [`Grid`] with a lazily computed spectrum.
///
/// A `Field` never changes after construction; every operation returns a new
/// value. The spectrum is the unnormalized DFT of the samples.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Grid,
    samples: Vec<f64>,
    spectrum: OnceLock<Vec<Complex64>>,
}

impl Field {
    pub fn new(grid: &Grid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.n() {
            return Err(LabError::input(
                "Field::new",
                format!("{} samples for a grid of {}", samples.len(), grid.n()),
            ));
        }
        if let Some(j) = samples.iter().position(|v| !v.is_finite()) {
            return Err(LabError::input(
                "Field::new",
                format!("non-finite sample at index {j}"),
            ));
        }
        Ok(Field {
            grid: grid.clone(),
            samples,
            spectrum: OnceLock::new(),
        })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Field {
            grid: grid.clone(),
            samples: vec![0.0; grid.n()],
            spectrum: OnceLock::new(),
        }
    }

    /// Samples `f(x_j)`. Panics on non-finite values, which would indicate a
    /// bug in the caller's closure rather than bad data.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        let samples: Vec<f64> = (0..grid.n()).map(|j| f(grid.x(j))).collect();
        assert!(
            samples.iter().all(|v| v.is_finite()),
            "Field::from_fn produced a non-finite sample"
        );
        Field {
            grid: grid.clone(),
            samples,
            spectrum: OnceLock::new(),
        }
    }

    /// Builds a field from a spectrum assumed conjugate symmetric.
    pub fn from_spectrum(grid: &Grid, spectrum: Vec<Complex64>) -> Result<Self> {
        let (samples, _) = grid.inverse(spectrum);
        Field::new(grid, samples)
    }

    /// Like [`Field::from_spectrum`] but also reports the largest imaginary
    /// part discarded by the inverse transform.
    pub(crate) fn from_spectrum_with_residue(
        grid: &Grid,
        spectrum: Vec<Complex64>,
    ) -> Result<(Self, f64)> {
        let (samples, residue) = grid.inverse(spectrum);
        let field = Field::new(grid, samples)?;
        Ok((field, residue))
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn spectrum(&self) -> &[Complex64] {
        self.spectrum.get_or_init(|| self.grid.forward(&self.samples))
    }

    /// `int u dx` by the rectangle rule, which is spectrally accurate on the
    /// torus. Equals `dx * spectrum[0]`.
    pub fn integral(&self) -> f64 {
        self.grid.dx() * self.samples.iter().sum::<f64>()
    }

    /// Continuous transform at `xi = 0`, `u_hat(0) = int u dx`, taken from
    /// the spectrum.
    pub fn mean_mode(&self) -> f64 {
        self.grid.dx() * self.spectrum()[0].re
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.dx() * self.samples.iter().map(|v| v * v).sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// Parseval form of `||u||^2`.
    pub fn l2_norm_sq_spectral(&self) -> f64 {
        let n = self.grid.n() as f64;
        self.grid.dx() / n * self.spectrum().iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `int u v dx`.
    pub fn dot(&self, other: &Field) -> f64 {
        self.check_same_grid(other);
        self.grid.dx()
            * self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a * b)
                .sum::<f64>()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field::from_samples_unchecked(&self.grid, self.samples.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise `f(x_j, u_j)`.
    pub fn map_with_x(&self, f: impl Fn(f64, f64) -> f64) -> Field {
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(j, &v)| f(self.grid.x(j), v))
            .collect();
        Field::from_samples_unchecked(&self.grid, samples)
    }

    pub fn zip_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Field {
        self.check_same_grid(other);
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Field::from_samples_unchecked(&self.grid, samples)
    }

    pub fn add(&self, other: &Field) -> Field {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Field {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Field) -> Field {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Field {
        self.map(|v| c * v)
    }

    /// `x^k u`.
    pub fn times_x_pow(&self, k: i32) -> Field {
        self.map_with_x(|x, v| x.powi(k) * v)
    }

    /// Largest `|u(x_j)|` over points with `|x_j| > radius`.
    pub fn sup_outside(&self, radius: f64) -> f64 {
        self.samples
            .iter()
            .enumerate()
            .filter(|(j, _)| self.grid.x(*j).abs() > radius)
            .fold(0.0f64, |m, (_, v)| m.max(v.abs()))
    }

    /// `int_{|x| <= radius} u^2 dx`.
    /// Riemann sum of the samples over `|x| <= radius`.
    pub fn integral_within(&self, radius: f64) -> f64 {
        self.grid.dx()
            * self
                .samples
                .iter()
                .enumerate()
                .filter(|(j, _)| self.grid.x(*j).abs() <= radius)
                .map(|(_, v)| v)
                .sum::<f64>()
    }

    pub fn l2_norm_sq_within(&self, radius: f64) -> f64 {
        self.grid.dx()
            * self
                .samples
                .iter()
                .enumerate()
                .filter(|(j, _)| self.grid.x(*j).abs() <= radius)
                .map(|(_, v)| v * v)
                .sum::<f64>()
    }

    pub(crate) fn from_samples_unchecked(grid: &Grid, samples: Vec<f64>) -> Field {
        debug_assert_eq!(samples.len(), grid.n());
        Field {
            grid: grid.clone(),
            samples,
            spectrum: OnceLock::new(),
        }
    }

    fn check_same_grid(&self, other: &Field) {
        assert!(self.grid == other.grid, "fields live on different grids");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(g: &Grid) -> Field {
        Field::from_fn(g, |x| (-x * x).exp())
    }

    #[test]
    fn round_trip_reproduces_samples() {
        let g = Grid::new(256, 16.0).unwrap();
        let f = Field::from_fn(&g, |x| (-x * x).exp() * (3.0 * x).cos() + 0.1 * x.sin());
        let back = Field::from_spectrum(&g, f.spectrum().to_vec()).unwrap();
        let err = back.sub(&f).l2_norm() / f.l2_norm();
        assert!(err <= 1e-13, "{err}");
    }

    #[test]
    fn parseval_agrees() {
        let g = Grid::new(512, 20.0).unwrap();
        let f = gaussian(&g);
        let rel = (f.l2_norm_sq() - f.l2_norm_sq_spectral()).abs() / f.l2_norm_sq();
        assert!(rel <= 1e-12);
        assert!((f.l2_norm_sq() - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn spectrum_of_real_field_is_conjugate_symmetric() {
        let g = Grid::new(64, 8.0).unwrap();
        let f = Field::from_fn(&g, |x| (-(x - 1.0).powi(2)).exp());
        let s = f.spectrum();
        for k in 1..g.n() {
            let d = s[k] - s[g.n() - k].conj();
            assert!(d.norm() <= 1e-13 * s[0].norm().max(1.0));
        }
    }

    #[test]
    fn mean_mode_is_integral() {
        let g = Grid::new(256, 16.0).unwrap();
        let f = gaussian(&g);
        assert!((f.mean_mode() - std::f64::consts::PI.sqrt()).abs() < 1e-13);
        assert!((f.integral() - f.mean_mode()).abs() < 1e-13);
    }

    #[test]
    fn rejects_wrong_length_and_nan() {
        let g = Grid::new(16, 1.0).unwrap();
        assert!(Field::new(&g, vec![0.0; 15]).is_err());
        let mut v = vec![0.0; 16];
        v[3] = f64::NAN;
        assert!(Field::new(&g, v).is_err());
    }
}
