use crate::error::{LabError, Result};
use crate::spectral::{Field, Grid};

/// `eta(x) = 4 / (1 + x^2)`.
pub fn eta(x: f64) -> f64 {
    4.0 / (1.0 + x * x)
}

/// Polarity of a soliton profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn value(self) -> f64 {
        match self {
            Polarity::Positive => 1.0,
            Polarity::Negative => -1.0,
        }
    }
}

/// `sign * c * eta(c (x - x0))`.
pub fn soliton(c: f64, x0: f64, grid: &Grid, polarity: Polarity) -> Result<Field> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(LabError::precondition("soliton", format!("speed c = {c} must be positive")));
    }
    let s = polarity.value();
    Ok(Field::from_fn(grid, |x| s * c * eta(c * (x - x0))))
}

/// Location of the extremum of `|u|`, refined by a parabola through the
/// three samples around it.
pub fn peak_location(u: &Field) -> f64 {
    let s = u.samples();
    let n = s.len();
    let j = (0..n).max_by(|&a, &b| s[a].abs().total_cmp(&s[b].abs())).unwrap_or(0);
    let (a, b, c) = (s[(j + n - 1) % n].abs(), s[j].abs(), s[(j + 1) % n].abs());
    let denom = a - 2.0 * b + c;
    let shift = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
    u.grid().x(j) + shift * u.grid().dx()
}
