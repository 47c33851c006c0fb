use std::fmt;
use std::sync::Arc;

use crate::spectral::{Field, Grid};
use crate::weights::{bracket_pow_derivatives, TruncatedWeight};

type Jet = dyn Fn(f64) -> [f64; 5] + Send + Sync;

/// A smooth coefficient function known together with its first four
/// derivatives in closed form.
#[derive(Clone)]
pub struct Profile {
    name: String,
    jet: Arc<Jet>,
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Profile").field("name", &self.name).finish()
    }
}

impl Profile {
    pub fn new(name: impl Into<String>, jet: impl Fn(f64) -> [f64; 5] + Send + Sync + 'static) -> Self {
        Profile {
            name: name.into(),
            jet: Arc::new(jet),
        }
    }

    pub fn constant(c: f64) -> Self {
        Profile::new(format!("const({c})"), move |_| [c, 0.0, 0.0, 0.0, 0.0])
    }

    pub fn linear() -> Self {
        Profile::new("x", |x| [x, 1.0, 0.0, 0.0, 0.0])
    }

    pub fn tanh() -> Self {
        Profile::new("tanh", |x| {
            let t = x.tanh();
            let s = 1.0 - t * t;
            [
                t,
                s,
                -2.0 * t * s,
                -2.0 * s * (1.0 - 3.0 * t * t),
                8.0 * t * s * (2.0 - 3.0 * t * t),
            ]
        })
    }

    pub fn sin() -> Self {
        Profile::new("sin", |x| {
            let (s, c) = x.sin_cos();
            [s, c, -s, -c, s]
        })
    }

    pub fn arctan() -> Self {
        Profile::new("arctan", |x| {
            let q = 1.0 / (1.0 + x * x);
            [
                x.atan(),
                q,
                -2.0 * x * q * q,
                (6.0 * x * x - 2.0) * q * q * q,
                24.0 * x * (1.0 - x * x) * q.powi(4),
            ]
        })
    }

    /// `<x>^m`.
    pub fn bracket_pow(m: f64) -> Self {
        Profile::new(format!("<x>^{m}"), move |x| bracket_pow_derivatives(x, m))
    }

    /// `<x>^m x`.
    pub fn bracket_pow_times_x(m: f64) -> Self {
        Profile::new(format!("<x>^{m} x"), move |x| {
            times_x(bracket_pow_derivatives(x, m), x)
        })
    }

    /// `<x>_N^m x` for a truncated weight.
    pub fn truncated_times_x(w: TruncatedWeight) -> Self {
        let name = format!("<x>_{}^{} x", w.cap(), w.exponent());
        Profile::new(name, move |x| times_x(w.derivatives(x), x))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Derivatives of order 0 through 4 at `x`.
    pub fn jet(&self, x: f64) -> [f64; 5] {
        (self.jet)(x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.jet(x)[0]
    }

    /// Samples of the `k`-th derivative, `k <= 4`.
    pub fn sample(&self, grid: &Grid, k: usize) -> Field {
        Field::from_fn(grid, |x| self.jet(x)[k])
    }

    /// Grid supremum of the `k`-th derivative.
    pub fn sup_derivative(&self, grid: &Grid, k: usize) -> f64 {
        self.sample(grid, k).sup_norm()
    }

    /// Same profile seen as a closure of `(x, k)`.
    pub fn derivative_fn(&self) -> impl Fn(f64, usize) -> f64 + '_ {
        move |x, k| self.jet(x)[k]
    }
}

fn times_x(w: [f64; 5], x: f64) -> [f64; 5] {
    let mut out = [0.0; 5];
    for k in 0..5 {
        out[k] = w[k] * x + if k > 0 { k as f64 * w[k - 1] } else { 0.0 };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_fd(p: &Profile) {
        let h = 1e-4;
        for &x in &[-2.3, -0.4, 0.0, 0.7, 1.9, 5.5] {
            let d = p.jet(x);
            let dp = p.jet(x + h);
            let dm = p.jet(x - h);
            for k in 0..4 {
                let fd = (dp[k] - dm[k]) / (2.0 * h);
                assert!(
                    (fd - d[k + 1]).abs() < 1e-6 * (1.0 + d[k + 1].abs()),
                    "{} k={k} x={x}: {fd} vs {}",
                    p.name(),
                    d[k + 1]
                );
            }
        }
    }

    #[test]
    fn closed_form_derivatives_match_differences() {
        for p in [
            Profile::tanh(),
            Profile::sin(),
            Profile::arctan(),
            Profile::bracket_pow(0.8),
            Profile::bracket_pow_times_x(0.8),
            Profile::truncated_times_x(TruncatedWeight::new(4.0, 0.8).unwrap()),
        ] {
            check_fd(&p);
        }
    }
}
