use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::quad::{geometric_breaks, panel, panels};
use crate::spectral::{Field, Grid, HomogeneousSymbol, LineOperator};
use crate::weights::{bracket_pow_derivatives, TruncatedWeight};

/// Below this `z` the symmetric difference is replaced by its Taylor series.
const TAYLOR_Z: f64 = 1e-3;
/// Upper end of the quadrature for the untruncated weight.
const FAR_Z: f64 = 1e12;

/// Cap scale of the weight: a finite `N` or none.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "n")]
pub enum Cap {
    Finite(f64),
    Infinite,
}

/// `<x>^a` or its truncation `<x>_N^a`.
#[derive(Debug, Clone)]
pub struct PowerWeight {
    a: f64,
    truncated: Option<TruncatedWeight>,
}

impl PowerWeight {
    pub fn new(a: f64, cap: Cap) -> Result<Self> {
        if !(a > 0.0 && a < 0.5) {
            return Err(LabError::precondition(
                "halfderiv_weight_bound",
                format!("exponent a = {a} outside (0, 1/2): D^1/2 <x>^a is unbounded"),
            ));
        }
        let truncated = match cap {
            Cap::Finite(n) => Some(TruncatedWeight::new(n, a)?),
            Cap::Infinite => None,
        };
        Ok(PowerWeight { a, truncated })
    }

    pub fn cap(&self) -> Cap {
        self.truncated
            .as_ref()
            .map_or(Cap::Infinite, |w| Cap::Finite(w.cap()))
    }

    fn jet(&self, x: f64) -> [f64; 5] {
        match &self.truncated {
            Some(w) => w.derivatives(x),
            None => bracket_pow_derivatives(x, self.a),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.jet(x)[0]
    }

    /// `D^1/2 w(x) = c int_0^inf (2w(x) - w(x+z) - w(x-z)) z^(-3/2) dz`,
    /// `c = 1 / (2 sqrt(2 pi))`.
    pub fn half_derivative(&self, x: f64) -> f64 {
        let c = 1.0 / (2.0 * (2.0 * PI).sqrt());
        let jet = self.jet(x);
        let w0 = jet[0];
        let g = |z: f64| 2.0 * w0 - self.eval(x + z) - self.eval(x - z);
        let ax = x.abs();

        let mut kinks = vec![ax];
        for k in 0..12 {
            let d = 0.5 * f64::from(1 << k);
            kinks.extend([ax - d, ax + d]);
        }
        if let Some(w) = &self.truncated {
            let n = w.cap();
            kinks.extend([(x - n).abs(), x + n, (x - 2.0 * n).abs(), x + 2.0 * n, (x + n).abs(), (x + 2.0 * n).abs()]);
        }
        kinks.retain(|k| *k > 0.0);

        // z = t^2 on [0, 1]
        let t_taylor = TAYLOR_Z.sqrt();
        let taylor = panel(0.0, t_taylor, |t| {
            let z = t * t;
            -2.0 * z * (jet[2] + jet[4] * z * z / 12.0)
        });
        let t_kinks: Vec<f64> = kinks.iter().filter(|k| **k < 1.0).map(|k| k.sqrt()).collect();
        let inner = panels(&geometric_breaks(t_taylor, 1.0, 1.5, &t_kinks), |t| {
            let z = t * t;
            2.0 * g(z) / z
        });

        let (far, tail) = match &self.truncated {
            Some(w) => {
                let far = ax + 2.0 * w.cap();
                let flat = w.eval(far + 1.0);
                (far, 4.0 * (w0 - flat) / far.sqrt())
            }
            None => {
                let a = self.a;
                (FAR_Z, 4.0 * w0 / FAR_Z.sqrt() - 2.0 * FAR_Z.powf(a - 0.5) / (0.5 - a))
            }
        };
        let outer = if far > 1.0 {
            panels(&geometric_breaks(1.0, far, 1.5, &kinks), |z| g(z) * z.powf(-1.5))
        } else {
            0.0
        };
        c * (taylor + inner + outer + tail)
    }
}

/// Sup of `|D^1/2 <x>_N^a|` over sampled points.
#[derive(Debug, Clone, Serialize)]
pub struct HalfDerivBound {
    pub a: f64,
    pub cap: Cap,
    pub sup: f64,
    pub argsup: f64,
    pub samples: usize,
}

/// Points `x >= 0` at which the sup is sampled; the weight is even.
fn sample_points(cap: Cap) -> Vec<f64> {
    let reach = match cap {
        Cap::Finite(n) => 3.0 * n,
        Cap::Infinite => 1e4,
    };
    let mut xs: Vec<f64> = (0..=200).map(|i| 4.0 * i as f64 / 200.0).collect();
    let mut x = 4.0;
    while x < reach {
        x *= 1.05;
        xs.push(x.min(reach));
    }
    if let Cap::Finite(n) = cap {
        xs.extend((0..=400).map(|i| n + 1.5 * n * i as f64 / 400.0));
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

pub fn halfderiv_weight_bound(a: f64, cap: Cap) -> Result<HalfDerivBound> {
    let w = PowerWeight::new(a, cap)?;
    let xs = sample_points(cap);
    let (argsup, sup) = xs
        .iter()
        .map(|&x| (x, w.half_derivative(x).abs()))
        .fold((0.0, -1.0), |best, p| if p.1 > best.1 { p } else { best });
    Ok(HalfDerivBound {
        a,
        cap,
        sup,
        argsup,
        samples: xs.len(),
    })
}

/// Fitted `c3` in `D^1/2 |x|^a ~ c3 |x|^(a - 1/2)`, read off the
/// untruncated weight at large `|x|`.
pub fn fit_c3(a: f64) -> Result<f64> {
    let w = PowerWeight::new(a, Cap::Infinite)?;
    let xs = [1e3_f64, 2e3, 4e3, 8e3];
    let c: Vec<f64> = xs.iter().map(|&x| w.half_derivative(x) * x.powf(0.5 - a)).collect();
    // the leading correction decays like x^-(1 + a); one Richardson step
    let p = 2f64.powf(-(1.0 + a));
    Ok((c[3] - p * c[2]) / (1.0 - p))
}

/// `D^1/2 <x>_N^a` on a grid through the whole-line spectral operator,
/// applied to `w - (3N/2)^a`, which is supported in `|x| <= 2N`.
pub fn spectral_half_derivative(a: f64, cap: f64, grid: &Grid) -> Result<Field> {
    let w = TruncatedWeight::new(cap, a)?;
    let flat = w.eval(2.0 * cap);
    let f = Field::from_fn(grid, |x| w.eval(x) - flat);
    LineOperator::new(grid, HomogeneousSymbol::frac(0.5)).apply(&f)
}

/// Largest pointwise gap between quadrature and spectral `D^1/2 <x>_N^a`
/// over grid points with `|x| <= radius`.
pub fn quadrature_vs_spectral(a: f64, cap: f64, grid: &Grid, radius: f64) -> Result<f64> {
    let spectral = spectral_half_derivative(a, cap, grid)?;
    let w = PowerWeight::new(a, Cap::Finite(cap))?;
    Ok((0..grid.n())
        .filter(|&j| grid.x(j).abs() <= radius)
        .map(|j| (w.half_derivative(grid.x(j)) - spectral.samples()[j]).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma;

    /// `D^s |x|^a = C |x|^(a - s)` from the Fourier transform of `|x|^a`.
    fn riesz_constant(a: f64, s: f64) -> f64 {
        2f64.powf(s) * gamma((a + 1.0) / 2.0) * gamma((s - a) / 2.0)
            / (gamma((a + 1.0 - s) / 2.0) * gamma(-a / 2.0))
    }

    #[test]
    fn refuses_outside_range() {
        assert!(halfderiv_weight_bound(0.6, Cap::Finite(16.0)).unwrap_err().is_refusal());
        assert!(halfderiv_weight_bound(0.5, Cap::Infinite).is_err());
    }

    #[test]
    fn c3_matches_closed_form() {
        for a in [0.2, 0.3, 0.45] {
            let fit = fit_c3(a).unwrap();
            let exact = riesz_constant(a, 0.5);
            assert!((fit - exact).abs() < 1e-3 * exact.abs(), "a={a}: {fit} vs {exact}");
        }
    }

    #[test]
    fn spectral_and_quadrature_agree() {
        let grid = Grid::new(2048, 128.0).unwrap();
        let gap = quadrature_vs_spectral(0.3, 16.0, &grid, 48.0).unwrap();
        assert!(gap < 1e-6, "{gap}");
    }

    #[test]
    fn larger_exponent_has_larger_bound() {
        let lo = halfderiv_weight_bound(0.3, Cap::Finite(16.0)).unwrap();
        let hi = halfderiv_weight_bound(0.49, Cap::Finite(16.0)).unwrap();
        assert!(lo.sup.is_finite() && hi.sup.is_finite());
        assert!(hi.sup > lo.sup);
    }
}
