use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{LabError, Result};

struct GridInner {
    n: usize,
    half_length: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Uniform periodic discretization of `[-L, L)` with `n` points.
///
/// Points are `x_j = -L + j dx`, so `x = 0` sits at `j = n/2`. Spectra use the
/// standard FFT ordering; index `k` carries wavenumber `pi * k' / L` with
/// `k' = k` for `k < n/2` and `k' = k - n` otherwise (the Nyquist index `n/2`
/// maps to `-n/2`).
///
/// FFT plans are shared immutably between clones; scratch space is allocated
/// per transform.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.inner.n)
            .field("half_length", &self.inner.half_length)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.inner.n == other.inner.n && self.inner.half_length == other.inner.half_length
    }
}

impl Grid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(n: usize, half_length: f64) -> Result<Self> {
        if n < Self::MIN_POINTS || !n.is_power_of_two() {
            return Err(LabError::precondition(
                "Grid::new",
                format!("point count must be a power of two >= {}, got {n}", Self::MIN_POINTS),
            ));
        }
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(LabError::precondition(
                "Grid::new",
                format!("half length must be positive and finite, got {half_length}"),
            ));
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        Ok(Grid {
            inner: Arc::new(GridInner {
                n,
                half_length,
                forward,
                inverse,
            }),
        })
    }

    /// Grid with the given spacing, rounding `2L/dx` to the next power of two.
    pub fn with_spacing(half_length: f64, dx: f64) -> Result<Self> {
        let n = ((2.0 * half_length / dx).round() as usize).next_power_of_two();
        Grid::new(n.max(Self::MIN_POINTS), half_length)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.inner.n
    }

    #[inline]
    pub fn half_length(&self) -> f64 {
        self.inner.half_length
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        2.0 * self.inner.half_length / self.inner.n as f64
    }

    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        -self.inner.half_length + j as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n()).map(|j| self.x(j)).collect()
    }

    /// Index of the point `x = 0`.
    #[inline]
    pub fn origin_index(&self) -> usize {
        self.n() / 2
    }

    #[inline]
    pub fn nyquist_index(&self) -> usize {
        self.n() / 2
    }

    /// Signed integer mode number of spectral index `k`.
    #[inline]
    pub fn mode(&self, k: usize) -> i64 {
        let n = self.n() as i64;
        let k = k as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    /// Wavenumber `xi_k = pi k' / L`.
    #[inline]
    pub fn wavenumber(&self, k: usize) -> f64 {
        PI * self.mode(k) as f64 / self.half_length()
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n()).map(|k| self.wavenumber(k)).collect()
    }

    /// Largest resolved wavenumber magnitude, `pi / dx`.
    #[inline]
    pub fn xi_max(&self) -> f64 {
        PI / self.dx()
    }

    /// Spacing of the frequency ladder, `pi / L`.
    #[inline]
    pub fn dxi(&self) -> f64 {
        PI / self.half_length()
    }

    /// Unnormalized forward DFT of real samples.
    pub fn forward(&self, samples: &[f64]) -> Vec<Complex64> {
        assert_eq!(samples.len(), self.n(), "sample count does not match grid");
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.inner.forward.process(&mut buf);
        buf
    }

    /// Inverse DFT including the `1/n` normalization. Returns the real part
    /// and the largest discarded imaginary component.
    pub fn inverse(&self, mut spectrum: Vec<Complex64>) -> (Vec<f64>, f64) {
        assert_eq!(spectrum.len(), self.n(), "spectrum length does not match grid");
        self.inner.inverse.process(&mut spectrum);
        let scale = 1.0 / self.n() as f64;
        let mut residue = 0.0f64;
        let out = spectrum
            .into_iter()
            .map(|c| {
                residue = residue.max((c.im * scale).abs());
                c.re * scale
            })
            .collect();
        (out, residue)
    }

    /// A grid covering the same box with twice as many points.
    pub fn refined(&self) -> Result<Grid> {
        Grid::new(2 * self.n(), self.half_length())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_or_non_power_of_two() {
        assert!(Grid::new(8, 1.0).is_err());
        assert!(Grid::new(24, 1.0).is_err());
        assert!(Grid::new(16, 0.0).is_err());
        assert!(Grid::new(16, 1.0).is_ok());
    }

    #[test]
    fn spacing_times_count_is_box_length() {
        let g = Grid::new(64, 3.5).unwrap();
        assert_eq!(g.dx() * 64.0, 7.0);
        assert_eq!(g.x(g.origin_index()), 0.0);
    }

    #[test]
    fn frequencies_antisymmetric_except_nyquist() {
        let g = Grid::new(32, 5.0).unwrap();
        for k in 1..g.n() / 2 {
            assert_eq!(g.wavenumber(k), -g.wavenumber(g.n() - k));
        }
        assert_eq!(g.mode(g.nyquist_index()), -16);
        assert_eq!(g.wavenumber(0), 0.0);
    }
}
