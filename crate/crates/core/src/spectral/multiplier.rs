use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;

use super::field::Field;
use super::grid::Grid;
use crate::error::{LabError, Result};

type SymbolFn = dyn Fn(f64) -> Complex64 + Send + Sync;

/// A diagonal Fourier multiplier with explicit values at `xi = 0` and at the
/// Nyquist index.
#[derive(Clone)]
pub struct MultiplierSpec {
    name: String,
    symbol: Arc<SymbolFn>,
    zero_mode: Complex64,
    nyquist: NyquistRule,
}

/// Value assigned at the Nyquist index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NyquistRule {
    Zero,
    /// Evaluate the symbol there; the result must be real.
    Symbol,
}

impl fmt::Debug for MultiplierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierSpec")
            .field("name", &self.name)
            .field("zero_mode", &self.zero_mode)
            .field("nyquist", &self.nyquist)
            .finish()
    }
}

const SYMMETRY_TOL: f64 = 1e-12;

impl MultiplierSpec {
    pub fn new(
        name: impl Into<String>,
        symbol: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        zero_mode: Complex64,
        nyquist: NyquistRule,
    ) -> Self {
        MultiplierSpec {
            name: name.into(),
            symbol: Arc::new(symbol),
            zero_mode,
            nyquist,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, xi: f64) -> Complex64 {
        (self.symbol)(xi)
    }

    pub fn zero_mode(&self) -> Complex64 {
        self.zero_mode
    }

    pub fn nyquist_rule(&self) -> NyquistRule {
        self.nyquist
    }

    /// Symbol values on the grid's frequency ladder, with the zero-mode and
    /// Nyquist rules applied and conjugate symmetry verified.
    pub fn values_on(&self, grid: &Grid) -> Result<Vec<Complex64>> {
        let n = grid.n();
        let nyq = grid.nyquist_index();
        let values: Vec<Complex64> = (0..n)
            .map(|k| match k {
                0 => self.zero_mode,
                k if k == nyq => match self.nyquist {
                    NyquistRule::Zero => Complex64::new(0.0, 0.0),
                    NyquistRule::Symbol => self.eval(grid.wavenumber(k)),
                },
                k => self.eval(grid.wavenumber(k)),
            })
            .collect();
        if let Some(k) = values.iter().position(|m| !(m.re.is_finite() && m.im.is_finite())) {
            return Err(LabError::input(
                "apply_multiplier",
                format!("symbol '{}' is not finite at xi = {}", self.name, grid.wavenumber(k)),
            ));
        }
        for (k, label) in [(0, "zero mode"), (nyq, "Nyquist mode")] {
            if values[k].im.abs() > SYMMETRY_TOL * values[k].norm().max(1.0) {
                return Err(LabError::convention(
                    "apply_multiplier",
                    format!("symbol '{}' has a non-real {label} value", self.name),
                ));
            }
        }
        for k in 1..nyq {
            let (a, b) = (values[k], values[n - k]);
            if (a - b.conj()).norm() > SYMMETRY_TOL * a.norm().max(b.norm()).max(1.0) {
                return Err(LabError::convention(
                    "apply_multiplier",
                    format!(
                        "symbol '{}' violates m(-xi) = conj m(xi) at xi = {}",
                        self.name,
                        grid.wavenumber(k)
                    ),
                ));
            }
        }
        Ok(values)
    }

    /// Pointwise product of two symbols; the zero-mode values multiply and
    /// the Nyquist rules combine.
    pub fn compose(&self, other: &MultiplierSpec) -> MultiplierSpec {
        let (a, b) = (self.symbol.clone(), other.symbol.clone());
        let nyquist = match (self.nyquist, other.nyquist) {
            (NyquistRule::Symbol, NyquistRule::Symbol) => NyquistRule::Symbol,
            _ => NyquistRule::Zero,
        };
        MultiplierSpec {
            name: format!("{}*{}", self.name, other.name),
            symbol: Arc::new(move |xi| a(xi) * b(xi)),
            zero_mode: self.zero_mode * other.zero_mode,
            nyquist,
        }
    }
}

/// Multiplies the spectrum of `f` by `m` and returns the real result.
pub fn apply_multiplier(f: &Field, m: &MultiplierSpec) -> Result<Field> {
    apply_multiplier_with_residue(f, m).map(|(out, _)| out)
}

/// [`apply_multiplier`] that also reports the largest imaginary part discarded
/// after the inverse transform.
pub fn apply_multiplier_with_residue(f: &Field, m: &MultiplierSpec) -> Result<(Field, f64)> {
    let grid = f.grid();
    let values = m.values_on(grid)?;
    let spectrum = f
        .spectrum()
        .iter()
        .zip(&values)
        .map(|(u, m)| u * m)
        .collect();
    Field::from_spectrum_with_residue(grid, spectrum)
}

/// `coeff * |xi|^order`, times `sgn xi` when `odd`.
///
/// The zero mode is always 0 and odd symbols vanish at the Nyquist index.
/// Even symbols need a real coefficient and odd ones an imaginary coefficient
/// to map real fields to real fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneousSymbol {
    pub order: f64,
    pub odd: bool,
    pub coeff: Complex64,
}

impl HomogeneousSymbol {
    pub fn new(order: f64, odd: bool, coeff: Complex64) -> Self {
        HomogeneousSymbol { order, odd, coeff }
    }

    /// `H`: `-i sgn xi`.
    pub fn hilbert() -> Self {
        Self::new(0.0, true, Complex64::new(0.0, -1.0))
    }

    /// `d/dx`: `i xi`.
    pub fn derivative() -> Self {
        Self::new(1.0, true, Complex64::new(0.0, 1.0))
    }

    /// `D^s`: `|xi|^s`.
    pub fn frac(s: f64) -> Self {
        Self::new(s, false, Complex64::new(1.0, 0.0))
    }

    /// `H d^2/dx^2`: `i sgn(xi) xi^2`.
    pub fn hilbert_second_derivative() -> Self {
        Self::hilbert().then(Self::derivative()).then(Self::derivative())
    }

    /// Product of symbols.
    pub fn then(self, other: Self) -> Self {
        Self::new(
            self.order + other.order,
            self.odd ^ other.odd,
            self.coeff * other.coeff,
        )
    }

    pub fn scaled(self, c: f64) -> Self {
        Self::new(self.order, self.odd, self.coeff * c)
    }

    pub fn eval(&self, xi: f64) -> Complex64 {
        if xi == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let mag = xi.abs().powf(self.order);
        let sign = if self.odd { xi.signum() } else { 1.0 };
        self.coeff * (sign * mag)
    }

    /// True when the symbol is a polynomial in `xi`, so it commutes with the
    /// periodic extension.
    pub fn is_polynomial(&self) -> bool {
        let k = self.order.round();
        (self.order - k).abs() < 1e-14 && k >= 0.0 && (k as i64 % 2 == 1) == self.odd
    }

    pub fn spec(&self) -> MultiplierSpec {
        let me = *self;
        let name = format!(
            "({})|xi|^{}{}",
            me.coeff,
            me.order,
            if me.odd { " sgn" } else { "" }
        );
        let nyquist = if me.odd {
            NyquistRule::Zero
        } else {
            NyquistRule::Symbol
        };
        MultiplierSpec::new(name, move |xi| me.eval(xi), Complex64::new(0.0, 0.0), nyquist)
    }
}

pub fn identity_spec() -> MultiplierSpec {
    MultiplierSpec::new("1", |_| Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), NyquistRule::Symbol)
}

/// `(i xi)^order`. Odd orders vanish at the Nyquist index.
pub fn derivative_spec(order: u32) -> MultiplierSpec {
    let nyquist = if order % 2 == 1 {
        NyquistRule::Zero
    } else {
        NyquistRule::Symbol
    };
    let zero = if order == 0 { 1.0 } else { 0.0 };
    MultiplierSpec::new(
        format!("(i xi)^{order}"),
        move |xi| Complex64::new(0.0, xi).powu(order),
        Complex64::new(zero, 0.0),
        nyquist,
    )
}

/// `(1 + xi^2)^{s/2}`.
pub fn bessel_spec(s: f64) -> MultiplierSpec {
    MultiplierSpec::new(
        format!("(1+xi^2)^({s}/2)"),
        move |xi| Complex64::new((1.0 + xi * xi).powf(0.5 * s), 0.0),
        Complex64::new(1.0, 0.0),
        NyquistRule::Symbol,
    )
}

/// Indicator of the modes kept by the 2/3 rule on `grid`: `|k| < n/3`.
pub fn dealias_spec(grid: &Grid) -> MultiplierSpec {
    let cutoff = grid.dxi() * grid.n() as f64 / 3.0;
    MultiplierSpec::new(
        "2/3 mask",
        move |xi| Complex64::new(if xi.abs() < cutoff { 1.0 } else { 0.0 }, 0.0),
        Complex64::new(1.0, 0.0),
        NyquistRule::Zero,
    )
}
