use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use super::bracket::{bracket_derivatives, power_derivatives};
use crate::error::{LabError, Result};
use crate::spectral::{Field, Grid};

/// Ceiling on the audited constants of `<x>_N^m`; with `m` in `[-2, 8]` the
/// observed values stay below a few hundred.
pub const AUDIT_CEILING: f64 = 1e4;

/// Smooth capped version of `<x>` raised to a power.
///
/// The base weight equals `<x>` for `|x| <= N`, is `3N/2` for `|x| >= 2N`,
/// and on `[N, 2N]` is the degree-seven polynomial in `t = (|x| - N)/N`
/// matching `<x>` to third order at `t = 0` and the constant to third order
/// at `t = 1`. The result is C^3, even and nondecreasing in `|x|`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TruncatedWeight {
    cap: f64,
    exponent: f64,
    coeffs: [f64; 8],
    audit: WeightAudit,
}

/// Finite-difference audit of a truncated weight.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightAudit {
    pub cap: f64,
    pub exponent: f64,
    /// `sup |d/dx <x>_N|`.
    pub slope_bound: f64,
    /// `sup_x |d^k/dx^k <x>_N^m| <x>^(k-m)` for `k = 0..=3`.
    pub derivative_constants: [f64; 4],
    /// Smallest finite-difference slope of the base weight on `x > 0`.
    pub min_slope: f64,
    pub monotone: bool,
    /// Largest mismatch between analytic and finite-difference derivatives,
    /// relative to the local scale.
    pub consistency: f64,
    pub pass: bool,
}

impl TruncatedWeight {
    pub fn new(cap: f64, exponent: f64) -> Result<Self> {
        if !(cap.is_finite() && cap >= 1.0) {
            return Err(LabError::precondition("TruncatedWeight", format!("cap N = {cap} must be >= 1")));
        }
        if !(-2.0..=8.0).contains(&exponent) {
            return Err(LabError::precondition(
                "TruncatedWeight",
                format!("exponent {exponent} outside [-2, 8]"),
            ));
        }
        let coeffs = hermite_coefficients(cap)?;
        let mut weight = TruncatedWeight {
            cap,
            exponent,
            coeffs,
            audit: WeightAudit {
                cap,
                exponent,
                slope_bound: 0.0,
                derivative_constants: [0.0; 4],
                min_slope: 0.0,
                monotone: false,
                consistency: 0.0,
                pass: false,
            },
        };
        weight.audit = weight.run_audit();
        if !weight.audit.pass {
            return Err(LabError::Audit {
                what: format!("truncated weight N={cap}, m={exponent}"),
                reason: format!("{:?}", weight.audit),
            });
        }
        Ok(weight)
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn audit(&self) -> &WeightAudit {
        &self.audit
    }

    pub fn coefficients(&self) -> &[f64; 8] {
        &self.coeffs
    }

    /// Base weight `<x>_N` and its first four derivatives.
    pub fn base_derivatives(&self, x: f64) -> [f64; 5] {
        let ax = x.abs();
        let n = self.cap;
        let mut d = if ax <= n {
            bracket_derivatives(ax)
        } else if ax >= 2.0 * n {
            [1.5 * n, 0.0, 0.0, 0.0, 0.0]
        } else {
            let t = (ax - n) / n;
            let mut out = [0.0; 5];
            for (k, slot) in out.iter_mut().enumerate() {
                let mut acc = 0.0;
                for i in (k..8).rev() {
                    let falling: f64 = (0..k).map(|r| (i - r) as f64).product();
                    acc += self.coeffs[i] * falling * t.powi((i - k) as i32);
                }
                *slot = acc / n.powi(k as i32);
            }
            out
        };
        if x < 0.0 {
            d[1] = -d[1];
            d[3] = -d[3];
        }
        d
    }

    /// `<x>_N^m` and its first four derivatives.
    pub fn derivatives(&self, x: f64) -> [f64; 5] {
        power_derivatives(self.base_derivatives(x), self.exponent)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.base_derivatives(x)[0].powf(self.exponent)
    }

    /// Samples on a grid whose box contains the cap region: `2N <= L/2`.
    pub fn sample(&self, grid: &Grid) -> Result<Field> {
        self.check_grid(grid)?;
        Ok(Field::from_fn(grid, |x| self.eval(x)))
    }

    /// Samples of the `k`-th derivative.
    pub fn sample_derivative(&self, grid: &Grid, k: usize) -> Result<Field> {
        self.check_grid(grid)?;
        Ok(Field::from_fn(grid, |x| self.derivatives(x)[k]))
    }

    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        if 2.0 * self.cap > 0.5 * grid.half_length() {
            return Err(LabError::precondition(
                "build_weight",
                format!("2N = {} exceeds L/2 = {}", 2.0 * self.cap, 0.5 * grid.half_length()),
            ));
        }
        Ok(())
    }

    fn run_audit(&self) -> WeightAudit {
        let n = self.cap;
        let m = self.exponent;
        let h = n / 4096.0;
        let steps = (3.0 * n / h) as usize;
        let base = |x: f64| self.base_derivatives(x)[0];
        let pow = |x: f64| base(x).powf(m);
        let mut slope_bound = 0.0f64;
        let mut min_slope = f64::INFINITY;
        let mut consts = [0.0f64; 4];
        let mut consistency = 0.0f64;
        for i in 0..=steps {
            let x = i as f64 * h;
            let bracket = (1.0 + x * x).sqrt();
            let fd = [
                pow(x),
                (pow(x + h) - pow(x - h)) / (2.0 * h),
                (pow(x + h) - 2.0 * pow(x) + pow(x - h)) / (h * h),
                (pow(x + 2.0 * h) - 2.0 * pow(x + h) + 2.0 * pow(x - h) - pow(x - 2.0 * h))
                    / (2.0 * h * h * h),
            ];
            for (k, v) in fd.iter().enumerate() {
                consts[k] = consts[k].max(v.abs() * bracket.powf(k as f64 - m));
            }
            let exact = self.derivatives(x);
            for k in 1..3 {
                let scale = bracket.powf(m - k as f64);
                consistency = consistency.max((fd[k] - exact[k]).abs() / scale);
            }
            let slope = (base(x + h) - base(x - h)) / (2.0 * h);
            slope_bound = slope_bound.max(slope.abs());
            if x > 0.0 {
                min_slope = min_slope.min(slope);
            }
        }
        // rounding in a centered difference of values near 3N/2
        let slope_tol = 8.0 * f64::EPSILON * 1.5 * n / h;
        let monotone = min_slope >= -slope_tol;
        let pass = monotone
            && slope_bound <= 1.0 + 1e-9 + slope_tol
            && consts.iter().all(|c| c.is_finite() && *c <= AUDIT_CEILING);
        WeightAudit {
            cap: n,
            exponent: m,
            slope_bound,
            derivative_constants: consts,
            min_slope,
            monotone,
            consistency,
            pass,
        }
    }
}

fn hermite_coefficients(n: f64) -> Result<[f64; 8]> {
    let d = bracket_derivatives(n);
    let a = [d[0], n * d[1], n * n * d[2] / 2.0, n.powi(3) * d[3] / 6.0];
    let m = Matrix4::new(
        1.0, 1.0, 1.0, 1.0, //
        4.0, 5.0, 6.0, 7.0, //
        12.0, 20.0, 30.0, 42.0, //
        24.0, 60.0, 120.0, 210.0,
    );
    let rhs = Vector4::new(
        1.5 * n - (a[0] + a[1] + a[2] + a[3]),
        -(a[1] + 2.0 * a[2] + 3.0 * a[3]),
        -(2.0 * a[2] + 6.0 * a[3]),
        -6.0 * a[3],
    );
    let sol = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| LabError::precondition("TruncatedWeight", "singular Hermite system"))?;
    Ok([a[0], a[1], a[2], a[3], sol[0], sol[1], sol[2], sol[3]])
}

/// Builds, audits and samples `<x>_N^m` on `grid`.
pub fn build_weight(cap: f64, exponent: f64, grid: &Grid) -> Result<(TruncatedWeight, Field)> {
    let w = TruncatedWeight::new(cap, exponent)?;
    let samples = w.sample(grid)?;
    Ok((w, samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_bracket_inside_and_cap_outside() {
        for &n in &[4.0, 16.0, 256.0] {
            let w = TruncatedWeight::new(n, 1.0).unwrap();
            assert_eq!(w.eval(0.0), 1.0);
            assert!((w.eval(0.5 * n) - (1.0 + 0.25 * n * n).sqrt()).abs() < 1e-12 * n);
            assert!((w.eval(2.0 * n) - 1.5 * n).abs() < 1e-12 * n);
            assert_eq!(w.eval(-3.0 * n), 1.5 * n);
        }
    }

    #[test]
    fn spline_is_c3_at_both_knots() {
        let n = 16.0;
        let w = TruncatedWeight::new(n, 1.0).unwrap();
        for knot in [n, 2.0 * n] {
            let lo = w.base_derivatives(knot - 1e-9);
            let hi = w.base_derivatives(knot + 1e-9);
            for k in 0..4 {
                assert!((lo[k] - hi[k]).abs() < 1e-6, "knot {knot} k {k}: {} {}", lo[k], hi[k]);
            }
        }
    }

    #[test]
    fn audit_constants_uniform_in_cap() {
        let consts: Vec<[f64; 4]> = [16.0, 64.0, 256.0]
            .iter()
            .map(|&n| TruncatedWeight::new(n, 0.8).unwrap().audit().derivative_constants)
            .collect();
        for k in 0..4 {
            let lo = consts.iter().map(|c| c[k]).fold(f64::INFINITY, f64::min);
            let hi = consts.iter().map(|c| c[k]).fold(0.0, f64::max);
            assert!(hi <= 1.05 * lo, "k={k}: {consts:?}");
        }
    }

    #[test]
    fn small_caps_fail_the_monotonicity_audit() {
        match TruncatedWeight::new(1.0, 1.0) {
            Err(LabError::Audit { .. }) => {}
            other => panic!("expected audit failure, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(TruncatedWeight::new(0.5, 1.0).is_err());
        assert!(TruncatedWeight::new(4.0, 9.0).is_err());
        let g = Grid::new(256, 32.0).unwrap();
        assert!(build_weight(16.0, 1.0, &g).unwrap_err().is_refusal());
        assert!(build_weight(8.0, 1.0, &g).is_ok());
    }
}
