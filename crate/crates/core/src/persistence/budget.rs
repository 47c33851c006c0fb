use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::solver::Snapshot;
use crate::spectral::{derivative, frac_deriv, Field};
use crate::weights::TruncatedWeight;

/// Relative change allowed when the snapshot stride is doubled.
pub const STRIDE_TOL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BudgetVariant {
    /// `int int (D^1/2 (x u))^2 <x>_N^{2 theta}`
    Step1,
    /// `int int (D^1/2 u_x)^2 <x>_N^{2 theta}`
    Step3,
}

#[derive(Debug, Clone, Serialize)]
pub struct SmoothingBudget {
    pub variant: BudgetVariant,
    pub theta: f64,
    pub cap: f64,
    pub value: f64,
    /// Same integral from every other snapshot.
    pub coarse: f64,
    pub stride_audit: bool,
}

fn density(u: &Field, weight: &Field, variant: BudgetVariant) -> Result<f64> {
    let inner = match variant {
        BudgetVariant::Step1 => u.times_x_pow(1),
        BudgetVariant::Step3 => derivative(u, 1),
    };
    let h = frac_deriv(&inner, 0.5)?;
    Ok(h.mul(&h).dot(weight))
}

fn trapezoid(ts: &[f64], ys: &[f64]) -> f64 {
    ts.windows(2)
        .zip(ys.windows(2))
        .map(|(t, y)| 0.5 * (y[0] + y[1]) * (t[1] - t[0]))
        .sum()
}

/// Space-time integral over the snapshot times, trapezoid in time, with the
/// truncated weight `<x>_N^{2 theta}`. The stride audit repeats the sum with
/// every other snapshot (endpoints kept).
pub fn smoothing_budget(
    snaps: &[Snapshot],
    theta: f64,
    variant: BudgetVariant,
    cap: f64,
) -> Result<SmoothingBudget> {
    if !(theta > 0.0 && theta < 0.5) {
        return Err(LabError::precondition(
            "smoothing_budget",
            format!("theta = {theta} outside (0, 1/2)"),
        ));
    }
    if snaps.len() < 3 || snaps.len().is_multiple_of(2) {
        return Err(LabError::precondition(
            "smoothing_budget",
            format!("need an odd number of at least 3 snapshots, got {}", snaps.len()),
        ));
    }
    let grid = snaps[0].field.grid();
    let weight = TruncatedWeight::new(cap, 2.0 * theta)?.sample(grid)?;
    let ts: Vec<f64> = snaps.iter().map(|s| s.t).collect();
    let ys = snaps
        .iter()
        .map(|s| density(&s.field, &weight, variant))
        .collect::<Result<Vec<_>>>()?;
    let value = trapezoid(&ts, &ys);
    let ts2: Vec<f64> = ts.iter().step_by(2).copied().collect();
    let ys2: Vec<f64> = ys.iter().step_by(2).copied().collect();
    let coarse = trapezoid(&ts2, &ys2);
    let scale = value.abs().max(f64::MIN_POSITIVE);
    Ok(SmoothingBudget {
        variant,
        theta,
        cap,
        value,
        coarse,
        stride_audit: value == 0.0 || (coarse - value).abs() <= STRIDE_TOL * scale,
    })
}

/// Largest relative spread of budget values over a cap ladder.
pub fn budget_drift(budgets: &[SmoothingBudget]) -> f64 {
    let max = budgets.iter().map(|b| b.value).fold(f64::MIN, f64::max);
    let min = budgets.iter().map(|b| b.value).fold(f64::MAX, f64::min);
    if max > 0.0 { (max - min) / max } else { 0.0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::{make_data, DataFamily};
    use crate::solver::{run_collect, DispersionSign, SolverConfig};
    use crate::spectral::Grid;

    fn gaussian_run(every: usize) -> Vec<Snapshot> {
        let g = Grid::with_spacing(64.0, 0.125).unwrap();
        let u0 = make_data(&DataFamily::gaussian(), &g).unwrap();
        let cfg = SolverConfig::new(&g, 1e-3, 0.5, DispersionSign::Plus).unwrap().with_snapshot_every(every);
        run_collect(&cfg, &u0).unwrap().1
    }

    #[test]
    fn zero_data_has_zero_budget() {
        let g = Grid::new(256, 16.0).unwrap();
        let snaps: Vec<_> = (0..3)
            .map(|k| Snapshot { step: k, t: k as f64, field: Field::zeros(&g) })
            .collect();
        for v in [BudgetVariant::Step1, BudgetVariant::Step3] {
            let b = smoothing_budget(&snaps, 0.3, v, 4.0).unwrap();
            assert_eq!(b.value, 0.0);
            assert!(b.stride_audit);
        }
    }

    #[test]
    fn preconditions() {
        let snaps = gaussian_run(250);
        assert_eq!(snaps.len(), 3);
        assert!(smoothing_budget(&snaps, 0.5, BudgetVariant::Step1, 8.0).unwrap_err().is_refusal());
        assert!(smoothing_budget(&snaps, 0.0, BudgetVariant::Step1, 8.0).is_err());
        assert!(smoothing_budget(&snaps[..2], 0.3, BudgetVariant::Step1, 8.0).is_err());
    }

    #[test]
    fn gaussian_budget_is_cap_stable_and_resolved() {
        let snaps = gaussian_run(25);
        for v in [BudgetVariant::Step1, BudgetVariant::Step3] {
            let b: Vec<_> = [4.0, 8.0, 16.0].iter().map(|&n| smoothing_budget(&snaps, 0.45, v, n).unwrap()).collect();
            assert!(b.iter().all(|x| x.value.is_finite() && x.value > 0.0 && x.stride_audit));
            assert!(budget_drift(&b) < 0.1, "{v:?}: {}", budget_drift(&b));
        }
    }
}
