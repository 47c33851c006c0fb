use serde::Serialize;

use crate::error::{LabError, Result};
use crate::spectral::{frac_deriv, Field};

use super::config::DispersionSign;
use super::run::Snapshot;

/// Residual of the linear fit, relative to the moment scale, above which the
/// fit is flagged.
pub const FIT_TOL: f64 = 1e-6;

/// `int x u dx`.
pub fn first_moment(u: &Field) -> f64 {
    u.times_x_pow(1).integral()
}

/// Rate at which the periodic box feeds first moment through its edge,
/// `-[x (sigma D u + u^2 / 2)]` between `x = -L` and `x = L`. On the line this
/// flux vanishes; on the box it is close to `sigma pi I1 / (2L)`.
pub fn edge_flux(u: &Field, sign: DispersionSign) -> f64 {
    let du = frac_deriv(u, 1.0).expect("order 1 is in range");
    let (d0, u0) = (du.samples()[0], u.samples()[0]);
    -2.0 * u.grid().half_length() * (sign.value() * d0 + 0.5 * u0 * u0)
}

/// Linear fit of the first moment against time.
#[derive(Debug, Clone, Serialize)]
pub struct MomentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Zero of the fitted line.
    pub zero_crossing: f64,
    /// `||u0||^2 / 2`.
    pub predicted_slope: f64,
    /// `-2 int x u0 / ||u0||^2`.
    pub predicted_crossing: f64,
    /// `-4 int x u0 / ||u0||^2`, the time stated for the sign change.
    pub stated_crossing: f64,
    pub residual_rms: f64,
    pub flagged: bool,
    /// Slope of the raw box moment, before the edge flux is removed.
    pub raw_slope: f64,
    /// Time-averaged edge flux.
    pub edge_rate: f64,
}

fn linear_fit(samples: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if samples.len() < 2 {
        return Err(LabError::input("first_moment_rate", "need at least two snapshots"));
    }
    let m = samples.len() as f64;
    let tm = samples.iter().map(|s| s.0).sum::<f64>() / m;
    let ym = samples.iter().map(|s| s.1).sum::<f64>() / m;
    let stt: f64 = samples.iter().map(|s| (s.0 - tm).powi(2)).sum();
    if stt == 0.0 {
        return Err(LabError::input("first_moment_rate", "snapshots share one time"));
    }
    let sty: f64 = samples.iter().map(|s| (s.0 - tm) * (s.1 - ym)).sum();
    let slope = sty / stt;
    let intercept = ym - slope * tm;
    let rms = (samples
        .iter()
        .map(|s| (s.1 - intercept - slope * s.0).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    Ok((slope, intercept, rms))
}

/// Fits the first moment of a run. The edge flux is integrated in time by
/// the trapezoid rule over the snapshots and removed before fitting.
pub fn first_moment_rate(snaps: &[Snapshot], sign: DispersionSign) -> Result<MomentFit> {
    let first = snaps
        .first()
        .ok_or_else(|| LabError::input("first_moment_rate", "no snapshots"))?;
    let raw: Vec<(f64, f64)> = snaps.iter().map(|s| (s.t, first_moment(&s.field))).collect();
    let flux: Vec<f64> = snaps.iter().map(|s| edge_flux(&s.field, sign)).collect();
    let mut fed = 0.0;
    let mut corrected = vec![raw[0]];
    for i in 1..snaps.len() {
        fed += 0.5 * (flux[i] + flux[i - 1]) * (raw[i].0 - raw[i - 1].0);
        corrected.push((raw[i].0, raw[i].1 - fed));
    }
    let mut fit = fit_moment_samples(&corrected, &first.field)?;
    fit.raw_slope = linear_fit(&raw)?.0;
    let span = raw[raw.len() - 1].0 - raw[0].0;
    fit.edge_rate = if span > 0.0 { fed / span } else { 0.0 };
    Ok(fit)
}

/// Fits `(t, int x u(t))` samples; `u0` supplies the predictions.
pub fn fit_moment_samples(samples: &[(f64, f64)], u0: &Field) -> Result<MomentFit> {
    let (slope, intercept, residual_rms) = linear_fit(samples)?;
    let scale = samples.iter().map(|s| s.1.abs()).fold(0.0, f64::max).max(u0.l2_norm_sq());
    let norm_sq = u0.l2_norm_sq();
    let m0 = first_moment(u0);
    let over = |k: f64| if norm_sq > 0.0 { -k * m0 / norm_sq } else { f64::NAN };
    Ok(MomentFit {
        slope,
        intercept,
        zero_crossing: if slope != 0.0 { -intercept / slope } else { f64::NAN },
        predicted_slope: 0.5 * norm_sq,
        predicted_crossing: over(2.0),
        stated_crossing: over(4.0),
        residual_rms,
        flagged: residual_rms > FIT_TOL * scale,
        raw_slope: slope,
        edge_rate: 0.0,
    })
}
