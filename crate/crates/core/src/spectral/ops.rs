use super::field::Field;
use super::multiplier::{
    apply_multiplier, bessel_spec, dealias_spec, derivative_spec, HomogeneousSymbol,
};
use crate::error::{LabError, Result};

/// Relative size of `u_hat(0)` below which a field counts as mean-zero.
pub const MEAN_ZERO_TOL: f64 = 1e-10;

pub fn hilbert(f: &Field) -> Field {
    apply_multiplier(f, &HomogeneousSymbol::hilbert().spec()).expect("Hilbert symbol is valid")
}

pub fn derivative(f: &Field, order: u32) -> Field {
    apply_multiplier(f, &derivative_spec(order)).expect("derivative symbol is valid")
}

/// True when `|u_hat(0)| <= MEAN_ZERO_TOL * ||f||_2`.
pub fn is_mean_zero(f: &Field) -> bool {
    f.mean_mode().abs() <= MEAN_ZERO_TOL * f.l2_norm()
}

/// `D^s f` for `s` in `[-1, 4]`. Negative orders require mean-zero input.
pub fn frac_deriv(f: &Field, s: f64) -> Result<Field> {
    if !(-1.0..=4.0).contains(&s) {
        return Err(LabError::precondition(
            "frac_deriv",
            format!("order {s} outside [-1, 4]"),
        ));
    }
    if s < 0.0 && !is_mean_zero(f) {
        return Err(LabError::precondition(
            "frac_deriv",
            format!(
                "order {s} needs mean-zero input, got u_hat(0) = {:e} with ||f|| = {:e}",
                f.mean_mode(),
                f.l2_norm()
            ),
        ));
    }
    apply_multiplier(f, &HomogeneousSymbol::frac(s).spec())
}

/// `J^s f = (1 - d^2/dx^2)^{s/2} f` for `s` in `[-4, 4]`.
pub fn bessel(f: &Field, s: f64) -> Result<Field> {
    if !(-4.0..=4.0).contains(&s) {
        return Err(LabError::precondition("bessel", format!("order {s} outside [-4, 4]")));
    }
    apply_multiplier(f, &bessel_spec(s))
}

/// Zeroes every mode with `|k| >= n/3`.
pub fn dealias(f: &Field) -> Field {
    apply_multiplier(f, &dealias_spec(f.grid())).expect("mask symbol is valid")
}

/// `u v` with both factors and the product restricted to the 2/3 band.
pub fn dealiased_product(u: &Field, v: &Field) -> Field {
    dealias(&dealias(u).mul(&dealias(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    #[test]
    fn hilbert_maps_cos_to_sin() {
        let g = Grid::new(64, PI).unwrap();
        for k in [1.0, 5.0, 20.0] {
            let f = Field::from_fn(&g, |x| (k * x).cos());
            let want = Field::from_fn(&g, |x| (k * x).sin());
            assert!(hilbert(&f).sub(&want).sup_norm() < 1e-13);
        }
    }

    #[test]
    fn hilbert_kills_constants() {
        let g = Grid::new(32, 2.0).unwrap();
        let f = Field::from_fn(&g, |_| 3.0);
        assert!(hilbert(&f).sup_norm() < 1e-15);
    }

    #[test]
    fn hilbert_squared_is_minus_identity_plus_mean() {
        let g = Grid::new(128, 10.0).unwrap();
        let f = Field::from_fn(&g, |x| (-(x - 1.0).powi(2)).exp());
        let hh = hilbert(&hilbert(&f));
        let mean = f.integral() / (2.0 * g.half_length());
        let want = f.map(|v| mean - v);
        assert!(hh.sub(&want).sup_norm() < 1e-13);
    }

    #[test]
    fn first_order_fractional_derivative_is_hilbert_derivative() {
        let g = Grid::new(256, 12.0).unwrap();
        let f = Field::from_fn(&g, |x| (-x * x).exp() * (2.0 * x).sin() + (-(x + 2.0).powi(2)).exp());
        let a = frac_deriv(&f, 1.0).unwrap();
        let b = hilbert(&derivative(&f, 1));
        assert!(a.sub(&b).l2_norm() <= 1e-12 * a.l2_norm());
    }

    #[test]
    fn negative_order_refuses_massive_input() {
        let g = Grid::new(128, 10.0).unwrap();
        let f = Field::from_fn(&g, |x| (-x * x).exp());
        let err = frac_deriv(&f, -0.5).unwrap_err();
        assert!(err.is_refusal());
        let dipole = derivative(&f, 1);
        assert!(frac_deriv(&dipole, -0.5).is_ok());
    }

    #[test]
    fn order_range_enforced() {
        let g = Grid::new(32, 2.0).unwrap();
        let f = Field::zeros(&g);
        assert!(frac_deriv(&f, 4.5).is_err());
        assert!(frac_deriv(&f, -1.5).is_err());
        assert!(bessel(&f, -4.5).is_err());
    }

    #[test]
    fn bessel_two_is_one_minus_laplacian() {
        let g = Grid::new(64, PI * 2.0).unwrap();
        let f = Field::from_fn(&g, |x| (3.0 * x).cos() + 0.5 * x.sin());
        let want = f.sub(&derivative(&f, 2));
        assert!(bessel(&f, 2.0).unwrap().sub(&want).sup_norm() < 1e-12);
        let round = bessel(&bessel(&f, 1.3).unwrap(), -1.3).unwrap();
        assert!(round.sub(&f).l2_norm() <= 1e-12 * f.l2_norm());
    }

    #[test]
    fn dealias_is_idempotent() {
        let g = Grid::new(64, 4.0).unwrap();
        let f = Field::from_fn(&g, |x| (-(x * x)).exp() * 7.0 * x.cos());
        let once = dealias(&f);
        let twice = dealias(&once);
        assert!(once.sub(&twice).sup_norm() <= 1e-15 * once.sup_norm());
    }
}
