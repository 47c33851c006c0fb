use crate::error::{LabError, Result};
use crate::spectral::{bessel, derivative, frac_deriv, hilbert, Field};

use super::profile::Profile;

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `[H; eta] f = H(eta f) - eta H f` with the periodic Hilbert transform.
pub fn hilbert_commutator(eta: &Field, f: &Field) -> Field {
    hilbert(&eta.mul(f)).sub(&eta.mul(&hilbert(f)))
}

/// `d^j [H; eta] d^k f`, expanded so that derivatives fall on `f` and on the
/// closed-form derivatives of `eta`.
pub fn calderon_field(eta: &Profile, f: &Field, j: u32, k: u32) -> Result<Field> {
    if j + k == 0 || j + k > 3 {
        return Err(LabError::precondition(
            "calderon_commutator",
            format!("need 1 <= j + k <= 3, got j = {j}, k = {k}"),
        ));
    }
    let grid = f.grid();
    let mut acc = Field::zeros(grid);
    for i in 0..=j {
        let eta_i = eta.sample(grid, i as usize);
        let term = hilbert_commutator(&eta_i, &derivative(f, j - i + k));
        acc = acc.add(&term.scale(binomial(j, i)));
    }
    Ok(acc)
}

/// `||d^j [H; eta] d^k f|| / (||eta^(j+k)||_inf ||f||)`.
pub fn calderon_ratio(eta: &Profile, f: &Field, j: u32, k: u32) -> Result<f64> {
    let c = calderon_field(eta, f, j, k)?;
    let num = c.l2_norm();
    let den = eta.sup_derivative(f.grid(), (j + k) as usize) * f.l2_norm();
    ratio("calderon_commutator", num, den)
}

fn ratio(op: &'static str, num: f64, den: f64) -> Result<f64> {
    if den > 0.0 {
        Ok(num / den)
    } else if num <= 1e-12 {
        Ok(0.0)
    } else {
        Err(LabError::convention(
            op,
            format!("vanishing bound with nonzero left side {num:e}"),
        ))
    }
}

/// `[D^s; eta] f`.
pub fn frac_commutator(s: f64, eta: &Field, f: &Field) -> Result<Field> {
    Ok(frac_deriv(&eta.mul(f), s)?.sub(&eta.mul(&frac_deriv(f, s)?)))
}

/// `||D^a [D^b; eta] D^(1-a-b) f|| / (||eta'||_inf ||f||)`.
pub fn smoothing_ratio(alpha: f64, beta: f64, eta: &Profile, f: &Field) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) || !(beta > 0.0 && beta <= 1.0 - alpha + 1e-15) {
        return Err(LabError::precondition(
            "smoothing_commutator",
            format!("need alpha in [0, 1] and beta in (0, 1 - alpha], got ({alpha}, {beta})"),
        ));
    }
    let grid = f.grid();
    let gamma = (1.0 - alpha - beta).max(0.0);
    let inner = frac_deriv(f, gamma)?;
    let c = frac_commutator(beta, &eta.sample(grid, 0), &inner)?;
    let lhs = frac_deriv(&c, alpha)?;
    ratio(
        "smoothing_commutator",
        lhs.l2_norm(),
        eta.sup_derivative(grid, 1) * f.l2_norm(),
    )
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(LabError::precondition(
            "smoothing_commutator",
            format!("need alpha in (0, 1), got {alpha}"),
        ))
    }
}

/// `||[D^a; eta] f|| / (||D^a eta||_inf ||f||)`. `D^a eta` is taken
/// spectrally, so `eta` should be periodic on the box.
pub fn commutator_ratio_by_eta(alpha: f64, eta: &Profile, f: &Field) -> Result<f64> {
    check_alpha(alpha)?;
    let e = eta.sample(f.grid(), 0);
    let c = frac_commutator(alpha, &e, f)?;
    let d_eta = frac_deriv(&e, alpha)?;
    ratio("smoothing_commutator", c.l2_norm(), d_eta.sup_norm() * f.l2_norm())
}

/// `||[D^a; eta] f|| / (||eta||_inf ||D^a f||)`.
pub fn commutator_ratio_by_f(alpha: f64, eta: &Profile, f: &Field) -> Result<f64> {
    check_alpha(alpha)?;
    let e = eta.sample(f.grid(), 0);
    let c = frac_commutator(alpha, &e, f)?;
    let df = frac_deriv(f, alpha)?;
    ratio("smoothing_commutator", c.l2_norm(), e.sup_norm() * df.l2_norm())
}

/// Which Leibniz-rule operator to measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeibnizKind {
    Bessel,
    Homogeneous,
}

/// `||P(fg)|| / (||f||_inf ||P g|| + ||g||_inf ||P f||)` with `P = J^s` or `D^s`.
pub fn leibniz_ratio(s: f64, kind: LeibnizKind, f: &Field, g: &Field) -> Result<f64> {
    if !(s > 0.0 && s <= 3.0) {
        return Err(LabError::precondition(
            "leibniz_check",
            format!("need s in (0, 3], got {s}"),
        ));
    }
    let op = |u: &Field| match kind {
        LeibnizKind::Bessel => bessel(u, s),
        LeibnizKind::Homogeneous => frac_deriv(u, s),
    };
    let lhs = op(&f.mul(g))?.l2_norm();
    let rhs = f.sup_norm() * op(g)?.l2_norm() + g.sup_norm() * op(f)?.l2_norm();
    ratio("leibniz_check", lhs, rhs)
}
