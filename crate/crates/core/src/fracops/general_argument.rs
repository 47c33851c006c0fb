use serde::Serialize;

use crate::error::{LabError, Result};
use crate::spectral::Field;

use super::identities::{IdentityId, IdentityOperators, IdentityReport};
use super::profile::Profile;

/// Tolerance on `|M0| / ||v||^2` for an affine weight.
pub const AFFINE_TOL: f64 = 1e-10;

/// Below this `||phi''||_inf` the weight counts as affine.
const AFFINE_CURVATURE: f64 = 1e-14;

#[derive(Debug, Clone, Serialize)]
pub struct GeneralArgumentReport {
    pub profile: String,
    pub m0: f64,
    pub curvature_sup: f64,
    pub mass: f64,
    /// `|M0| / (||phi''||_inf ||v||^2)`; for affine weights `|M0| / ||v||^2`.
    pub ratio: f64,
    pub affine: bool,
    pub n: usize,
    pub half_length: f64,
}

impl GeneralArgumentReport {
    pub fn to_identity_report(&self, descriptor: &str, v: &Field) -> IdentityReport {
        let (normalizer, tol) = if self.affine {
            (self.mass, AFFINE_TOL)
        } else {
            (self.curvature_sup * self.mass, f64::INFINITY)
        };
        let mut r = IdentityReport::new(IdentityId::A1, v, descriptor, self.m0.abs(), normalizer, tol);
        r.constant = Some(self.m0);
        r.constant_ratio = Some(self.ratio);
        r
    }
}

/// `M0 = int (H v'') v phi + int (D^1/2 v)^2 phi'` on the line.
///
/// `v` must be supported in `|x| <= L/4`. The second integral is split as
/// `phi'_inf int v D v + int (D^1/2 v)^2 (phi' - phi'_inf)` with
/// `phi'_inf = phi'(3L/4)`, and the last piece integrated over `|x| <= 3L/4`.
pub fn general_argument_m0(ops: &IdentityOperators, v: &Field, phi: &Profile) -> Result<f64> {
    let grid = v.grid();
    let r = ops.d().valid_radius();
    let slope_far = 0.5 * (phi.jet(r)[1] + phi.jet(-r)[1]);
    let av = ops.hilbert_second_derivative().apply(v)?;
    let transport = av.mul(v).dot(&phi.sample(grid, 0));
    let dv = ops.d().apply(v)?;
    let half = ops.half_derivative().apply(v)?;
    let near = half
        .mul(&half)
        .zip_with(&phi.sample(grid, 1), |h2, p1| h2 * (p1 - slope_far))
        .integral_within(r);
    Ok(transport + slope_far * v.dot(&dv) + near)
}

/// Measures `|M0| / (||phi''||_inf ||v||^2)`. An affine `phi` must give
/// `M0 = 0` to `1e-10 ||v||^2`.
pub fn general_argument_check(
    ops: &IdentityOperators,
    v: &Field,
    phi: &Profile,
) -> Result<GeneralArgumentReport> {
    let m0 = general_argument_m0(ops, v, phi)?;
    let curvature_sup = phi.sup_derivative(v.grid(), 2);
    let mass = v.l2_norm_sq();
    let affine = curvature_sup <= AFFINE_CURVATURE;
    let ratio = if affine {
        let r = m0.abs() / mass;
        if r > AFFINE_TOL {
            return Err(LabError::convention(
                "general_argument_check",
                format!("affine weight {} leaves M0 = {m0:e}", phi.name()),
            ));
        }
        r
    } else {
        m0.abs() / (curvature_sup * mass)
    };
    Ok(GeneralArgumentReport {
        profile: phi.name().to_string(),
        m0,
        curvature_sup,
        mass,
        ratio,
        affine,
        n: v.grid().n(),
        half_length: v.grid().half_length(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{derivative, Grid};
    use crate::weights::TruncatedWeight;

    fn setup() -> (Grid, IdentityOperators) {
        let g = Grid::new(2048, 128.0).unwrap();
        let ops = IdentityOperators::new(&g);
        (g, ops)
    }

    #[test]
    fn affine_weight_leaves_nothing() {
        let (g, ops) = setup();
        let v = Field::from_fn(&g, |x| (-(x - 1.0) * (x - 1.0)).exp() + 0.5 * (-x * x / 4.0).exp());
        let rep = general_argument_check(&ops, &v, &Profile::linear()).unwrap();
        assert!(rep.affine);
        assert!(rep.ratio < AFFINE_TOL, "{}", rep.ratio);
    }

    #[test]
    fn curved_weights_give_finite_ratio() {
        let (g, ops) = setup();
        let v = derivative(&Field::from_fn(&g, |x| (-x * x).exp()), 1);
        for phi in [
            Profile::arctan(),
            Profile::truncated_times_x(TruncatedWeight::new(16.0, 0.8).unwrap()),
        ] {
            let rep = general_argument_check(&ops, &v, &phi).unwrap();
            assert!(rep.ratio.is_finite() && rep.ratio > 0.0 && rep.ratio < 10.0, "{rep:?}");
        }
    }

    #[test]
    fn quadratic_weight_leaves_nothing() {
        // in Fourier variables the two integrals differ by a multiple of
        // int sgn(xi) |v_hat|^2, which vanishes for real v
        let (g, ops) = setup();
        let phi = Profile::new("x^2/2", |x| [0.5 * x * x, x, 1.0, 0.0, 0.0]);
        let bump = Field::from_fn(&g, |x| {
            (-(x - 0.4) * (x - 0.4)).exp() - 0.7 * (-(x - 1.9).powi(2) / 2.0).exp()
        });
        let v = derivative(&bump, 1);
        let m0 = general_argument_m0(&ops, &v, &phi).unwrap();
        assert!(m0.abs() < 1e-9 * v.l2_norm_sq(), "{m0}");
    }
}
