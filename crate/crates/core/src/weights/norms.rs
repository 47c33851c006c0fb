use serde::{Deserialize, Serialize};

use super::truncated::TruncatedWeight;
use crate::error::{LabError, Result};
use crate::spectral::{apply_multiplier, bessel_spec, Field};

/// Which spatial weight a norm uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "cap", rename_all = "snake_case")]
pub enum WeightKind {
    /// `<x>^r`
    Exact,
    /// `<x>_N^r`
    Truncated(f64),
}

/// Norms of one snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRecord {
    pub t: f64,
    pub s: f64,
    pub r: f64,
    pub weight: WeightKind,
    /// `||J^s u||_2`
    pub sobolev: f64,
    /// `||<x>^r u||_2`
    pub weighted: f64,
    /// `(sobolev^2 + weighted^2)^(1/2)`
    pub z: f64,
    pub mean_mode: f64,
    pub first_moment: f64,
}

/// `<x>^r` or `<x>_N^r` sampled on the field's grid.
pub fn weight_field(u: &Field, r: f64, kind: WeightKind) -> Result<Field> {
    match kind {
        WeightKind::Exact => Ok(Field::from_fn(u.grid(), |x| (1.0 + x * x).powf(0.5 * r))),
        WeightKind::Truncated(cap) => TruncatedWeight::new(cap, r)?.sample(u.grid()),
    }
}

/// `||<x>^r u||_2` with the chosen weight.
pub fn weighted_norm(u: &Field, r: f64, kind: WeightKind) -> Result<f64> {
    Ok(weight_field(u, r, kind)?.mul(u).l2_norm())
}

/// `||J^s u||_2` for `s` in `[0, 5]`.
pub fn sobolev_norm(u: &Field, s: f64) -> Result<f64> {
    Ok(apply_multiplier(u, &bessel_spec(s))?.l2_norm())
}

/// Norms of `u` in `Z_{s,r} = H^s ∩ L^2(<x>^{2r} dx)`.
pub fn z_norm(u: &Field, s: f64, r: f64, kind: WeightKind) -> Result<NormRecord> {
    if !(0.0..=5.0).contains(&s) || !(0.0..=4.0).contains(&r) {
        return Err(LabError::precondition(
            "z_norm",
            format!("need s in [0, 5] and r in [0, 4], got s = {s}, r = {r}"),
        ));
    }
    let sobolev = sobolev_norm(u, s)?;
    let weighted = weighted_norm(u, r, kind)?;
    Ok(NormRecord {
        t: 0.0,
        s,
        r,
        weight: kind,
        sobolev,
        weighted,
        z: sobolev.hypot(weighted),
        mean_mode: u.mean_mode(),
        first_moment: u.times_x_pow(1).integral(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    #[test]
    fn zero_orders_give_l2() {
        let g = Grid::new(512, 32.0).unwrap();
        let u = Field::from_fn(&g, |x| (-x * x).exp() * (1.0 + x));
        let rec = z_norm(&u, 0.0, 0.0, WeightKind::Exact).unwrap();
        assert!((rec.sobolev - u.l2_norm()).abs() < 1e-13);
        assert!((rec.weighted - u.l2_norm()).abs() < 1e-13);
    }

    #[test]
    fn soliton_l2_norm() {
        // int 16/(1+x^2)^2 dx = 8 pi, with a tail of order L^-3 outside the box
        let g = Grid::new(1 << 16, 2048.0).unwrap();
        let u = Field::from_fn(&g, |x| 4.0 / (1.0 + x * x));
        assert!((u.l2_norm_sq() - 8.0 * PI).abs() < 1e-8);
    }

    #[test]
    fn monotone_in_weight_exponent() {
        let g = Grid::new(512, 32.0).unwrap();
        let u = Field::from_fn(&g, |x| 1.0 / (1.0 + x.powi(4)));
        let a = weighted_norm(&u, 0.5, WeightKind::Exact).unwrap();
        let b = weighted_norm(&u, 1.0, WeightKind::Exact).unwrap();
        assert!(a <= b);
    }

    #[test]
    fn range_checked() {
        let g = Grid::new(64, 8.0).unwrap();
        let u = Field::zeros(&g);
        assert!(z_norm(&u, 5.5, 0.0, WeightKind::Exact).is_err());
        assert!(z_norm(&u, 1.0, 4.5, WeightKind::Exact).is_err());
    }
}
