use serde::Serialize;

use crate::spectral::{frac_deriv, Field};

use super::config::DispersionSign;

/// `I1 = int u`, `I2 = int u^2`, `I3 = int (u D u / 2 + sigma u^3 / 6)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConservedTriple {
    pub mass: f64,
    pub l2: f64,
    pub energy: f64,
    pub mean_mode: f64,
}

pub fn conserved(u: &Field, sign: DispersionSign) -> ConservedTriple {
    let du = frac_deriv(u, 1.0).expect("order 1 is in range");
    let cubic = u.samples().iter().map(|x| x * x * x).sum::<f64>() * u.grid().dx();
    ConservedTriple {
        mass: u.integral(),
        l2: u.l2_norm_sq(),
        energy: 0.5 * u.dot(&du) + sign.value() * cubic / 6.0,
        mean_mode: u.mean_mode(),
    }
}
