use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use statrs::function::gamma::ln_gamma;

use super::field::Field;
use super::grid::Grid;
use super::multiplier::{apply_multiplier, HomogeneousSymbol};
use crate::error::{LabError, Result};
use crate::special::{is_trivial_zero, zeta};

/// Inputs must vanish (relative to their sup) beyond this fraction of `L`.
pub const SUPPORT_FRACTION: f64 = 0.25;
/// Outputs agree with the whole-line operator within this fraction of `L`.
pub const VALID_FRACTION: f64 = 0.75;
const SUPPORT_TOL: f64 = 1e-12;
const TERMS: usize = 90;

/// A homogeneous multiplier evaluated as the operator on the whole line
/// rather than on the torus.
///
/// The periodic FFT result is a trapezoid rule in frequency for the inverse
/// transform, with the singular point `xi = 0` left out. The generalized
/// Euler-Maclaurin expansion of that rule for `|xi|^s`-type integrands gives
/// its deviation from the integral as a series in `zeta(-s-j) h^{s+j+1}` times
/// moments of the input; those moments are a convolution of the input with a
/// fixed kernel, subtracted here by a zero-padded FFT.
///
/// Valid for inputs supported in `|x| <= L/4`, at points `|x| <= 3L/4`.
#[derive(Clone)]
pub struct LineOperator {
    grid: Grid,
    symbol: HomogeneousSymbol,
    kernel_hat: Option<Arc<Vec<Complex64>>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    noise_floor: Option<f64>,
}

impl fmt::Debug for LineOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LineOperator")
            .field("grid", &self.grid)
            .field("symbol", &self.symbol)
            .finish()
    }
}

/// Coefficients `a_j` with correction kernel `K(z) = sum_j a_j (i z / 2L)^j`,
/// before multiplying by the symbol's coefficient.
fn kernel_coefficients(order: f64, odd: bool, half_length: f64) -> Vec<f64> {
    let h = PI / half_length;
    let scale = (2.0 * half_length).powf(-(1.0 + order));
    (0..TERMS)
        .map(|j| {
            if (j % 2 == 1) != odd {
                return 0.0;
            }
            let x = -order - j as f64;
            if is_trivial_zero(x) {
                return 0.0;
            }
            if x >= 0.5 {
                return 2.0 * zeta(x) * h.powf(order + 1.0);
            }
            let w = 1.0 - x;
            let log_mag = ln_gamma(w) - ln_gamma(j as f64 + 1.0);
            4.0 * (0.5 * PI * x).sin() * zeta(w) * log_mag.exp() * scale
        })
        .collect()
}

impl LineOperator {
    pub fn new(grid: &Grid, symbol: HomogeneousSymbol) -> Self {
        let n = grid.n();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(4 * n);
        let inv = planner.plan_fft_inverse(4 * n);
        let kernel_hat = (!symbol.is_polynomial()).then(|| {
            let l = grid.half_length();
            let a = kernel_coefficients(symbol.order, symbol.odd, l);
            let dx = grid.dx();
            let weight = dx / (2.0 * PI);
            let mut g = vec![Complex64::new(0.0, 0.0); 4 * n];
            for (slot, m) in g.iter_mut().zip(-(n as i64)..(n as i64)) {
                let z = m as f64 * dx;
                if z.abs() > l {
                    continue;
                }
                let u = z / (2.0 * l);
                // sum_j a_j (i u)^j, split into real and imaginary parts
                let (mut re, mut im, mut p) = (0.0, 0.0, 1.0);
                for (j, aj) in a.iter().enumerate() {
                    match j % 4 {
                        0 => re += aj * p,
                        1 => im += aj * p,
                        2 => re -= aj * p,
                        _ => im -= aj * p,
                    }
                    p *= u;
                }
                let k = symbol.coeff * Complex64::new(re, im);
                *slot = Complex64::new(k.re * weight, 0.0);
            }
            fwd.process(&mut g);
            Arc::new(g)
        });
        LineOperator {
            grid: grid.clone(),
            symbol,
            kernel_hat,
            fwd,
            inv,
            noise_floor: None,
        }
    }

    /// Zeroes input modes with `|f_hat| <= rel * max |f_hat|` before the
    /// symbol is applied, so that rounding noise in unresolved modes is not
    /// amplified by growing symbols.
    pub fn with_noise_floor(mut self, rel: f64) -> Self {
        self.noise_floor = Some(rel);
        self
    }

    pub fn symbol(&self) -> HomogeneousSymbol {
        self.symbol
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Radius within which outputs are trusted.
    pub fn valid_radius(&self) -> f64 {
        VALID_FRACTION * self.grid.half_length()
    }

    /// Refuses inputs that do not vanish outside `|x| <= L/4`.
    pub fn check_support(&self, f: &Field) -> Result<()> {
        let radius = SUPPORT_FRACTION * self.grid.half_length();
        let outside = f.sup_outside(radius);
        let sup = f.sup_norm();
        if outside > SUPPORT_TOL * sup {
            return Err(LabError::precondition(
                "LineOperator::apply",
                format!(
                    "input not supported in |x| <= {radius}: |f| reaches {outside:e} outside (sup {sup:e})"
                ),
            ));
        }
        Ok(())
    }

    pub fn apply(&self, f: &Field) -> Result<Field> {
        if f.grid() != &self.grid {
            return Err(LabError::input("LineOperator::apply", "field is on a different grid"));
        }
        self.check_support(f)?;
        let periodic = match self.noise_floor {
            None => apply_multiplier(f, &self.symbol.spec())?,
            Some(rel) => {
                let spec = f.spectrum();
                let floor = rel * spec.iter().map(|c| c.norm()).fold(0.0, f64::max);
                let values = self.symbol.spec().values_on(&self.grid)?;
                let filtered = spec
                    .iter()
                    .zip(&values)
                    .map(|(u, m)| if u.norm() > floor { u * m } else { Complex64::new(0.0, 0.0) })
                    .collect();
                Field::from_spectrum(&self.grid, filtered)?
            }
        };
        let Some(kernel_hat) = &self.kernel_hat else {
            return Ok(periodic);
        };
        let n = self.grid.n();
        let mut buf = vec![Complex64::new(0.0, 0.0); 4 * n];
        for (b, &v) in buf.iter_mut().zip(f.samples()) {
            b.re = v;
        }
        self.fwd.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(kernel_hat.iter()) {
            *b *= k;
        }
        self.inv.process(&mut buf);
        let norm = 1.0 / (4 * n) as f64;
        let samples = periodic
            .samples()
            .iter()
            .zip(&buf[n..2 * n])
            .map(|(p, c)| p - c.re * norm)
            .collect();
        Field::new(&self.grid, samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(2048, 64.0).unwrap()
    }

    /// Dawson's integral `F(x) = e^{-x^2} int_0^x e^{t^2} dt` by Rybicki's
    /// sampling formula.
    fn dawson(x: f64) -> f64 {
        let h = 0.2f64;
        let xx = x.abs();
        let n0 = 2 * ((0.5 * xx / h).round() as i64);
        let xp = xx - n0 as f64 * h;
        let e1 = (2.0 * xp * h).exp();
        let e2 = e1 * e1;
        let (mut d1, mut d2) = (n0 as f64 + 1.0, n0 as f64 - 1.0);
        let (mut up, mut down) = (e1, 1.0 / e1);
        let mut sum = 0.0;
        for i in 0..40 {
            let c = (-((2.0 * i as f64 + 1.0) * h).powi(2)).exp();
            sum += c * (up / d1 + down / d2);
            d1 += 2.0;
            d2 -= 2.0;
            up *= e2;
            down /= e2;
        }
        x.signum() * sum * (-(xp * xp)).exp() / PI.sqrt()
    }

    #[test]
    fn dawson_reference_values() {
        assert!((dawson(1.0) - 0.5380795069127684).abs() < 1e-14);
        assert!((dawson(10.0) - 0.05025384718759853).abs() < 1e-14);
    }

    #[test]
    fn hilbert_of_gaussian_is_dawson() {
        // H e^{-x^2} = (2/sqrt(pi)) F(x)
        let g = grid();
        let f = Field::from_fn(&g, |x| (-x * x).exp());
        let op = LineOperator::new(&g, HomogeneousSymbol::hilbert());
        let out = op.apply(&f).unwrap();
        for j in (0..g.n()).step_by(7) {
            let x = g.x(j);
            if x.abs() > op.valid_radius() {
                continue;
            }
            let want = 2.0 / PI.sqrt() * dawson(x);
            assert!((out.samples()[j] - want).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn periodic_hilbert_has_wraparound_error() {
        let g = grid();
        let f = Field::from_fn(&g, |x| (-x * x).exp());
        let op = LineOperator::new(&g, HomogeneousSymbol::hilbert());
        let line = op.apply(&f).unwrap();
        let periodic = apply_multiplier(&f, &HomogeneousSymbol::hilbert().spec()).unwrap();
        assert!(line.sub(&periodic).l2_norm_sq_within(32.0).sqrt() > 1e-4);
    }

    #[test]
    fn polynomial_symbol_has_no_correction() {
        let g = grid();
        let f = Field::from_fn(&g, |x| (-x * x).exp());
        let op = LineOperator::new(&g, HomogeneousSymbol::derivative());
        let want = Field::from_fn(&g, |x| -2.0 * x * (-x * x).exp());
        assert!(op.apply(&f).unwrap().sub(&want).sup_norm() < 1e-12);
    }

    #[test]
    fn rejects_wide_support() {
        let g = grid();
        let f = Field::from_fn(&g, |x| (-(x * x) / 400.0).exp());
        let op = LineOperator::new(&g, HomogeneousSymbol::hilbert());
        assert!(op.apply(&f).unwrap_err().is_refusal());
    }
}
