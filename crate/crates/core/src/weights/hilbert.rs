use super::norms::{weight_field, WeightKind};
use crate::error::{LabError, Result};
use crate::spectral::{apply_multiplier, bessel_spec, hilbert, Field};

/// `||<x>^beta H f||_2 / ||<x>^beta f||_2` with the periodic Hilbert transform.
pub fn weighted_hilbert_ratio(f: &Field, beta: f64, kind: WeightKind) -> Result<f64> {
    if !(beta > -0.5 && beta < 0.5) {
        return Err(LabError::precondition(
            "weighted_hilbert_ratio",
            format!("beta = {beta} outside (-1/2, 1/2)"),
        ));
    }
    let w = weight_field(f, beta, kind)?;
    let den = w.mul(f).l2_norm();
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok(w.mul(&hilbert(f)).l2_norm() / den)
}

/// Exponents of the two endpoint norms `||<x>^a J^b f||` and `||<x>^c J^d f||`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationPair {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

fn weighted_bessel_norm(f: &Field, weight: f64, order: f64) -> Result<f64> {
    let j = apply_multiplier(f, &bessel_spec(order))?;
    Ok(weight_field(f, weight, WeightKind::Exact)?.mul(&j).l2_norm())
}

/// Ratio of `||<x>^{ta+(1-t)c} J^{tb+(1-t)d} f||` to
/// `||<x>^a J^b f||^t ||<x>^c J^d f||^(1-t)`.
pub fn interpolation_check(f: &Field, e: InterpolationPair, theta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(LabError::precondition(
            "interpolation_check",
            format!("theta = {theta} outside [0, 1]"),
        ));
    }
    let mix = |p: f64, q: f64| theta * p + (1.0 - theta) * q;
    let lhs = weighted_bessel_norm(f, mix(e.a, e.c), mix(e.b, e.d))?;
    let left = weighted_bessel_norm(f, e.a, e.b)?;
    let right = weighted_bessel_norm(f, e.c, e.d)?;
    let rhs = left.powf(theta) * right.powf(1.0 - theta);
    if rhs == 0.0 {
        return Ok(0.0);
    }
    Ok(lhs / rhs)
}
