use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::quad;

/// Dyadic scales added by each refinement.
pub const SCALES_PER_LEVEL: u32 = 10;
/// Consecutive growth factor that counts as divergence.
pub const DIVERGENCE_RATIO: f64 = 1.2;
/// Refinements that must show that growth.
pub const DIVERGENCE_STEPS: usize = 4;
/// Relative change over the last refinement that counts as a plateau.
pub const PLATEAU_TOL: f64 = 0.05;
/// Increments that shrink by less than this factor per refinement do not
/// sum: the constant grows at least logarithmically.
pub const SUSTAINED_RATIO: f64 = 0.95;
/// Increments below this fraction of the constant are rounding.
const INCREMENT_FLOOR: f64 = 1e-6;
const CENTER_STEPS: i64 = 32;

/// `w = |x|^{2 beta}` or `w = <x>^{2 beta}`, so that `beta` is the exponent
/// of the multiplier acting on `L^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum A2WeightKind {
    Power,
    Bracket,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum A2Verdict {
    Finite,
    Divergent,
    Undetermined,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct A2Level {
    pub level: usize,
    pub constant: f64,
    /// Smallest interval length in the family.
    pub min_length: f64,
    /// Largest interval length in the family.
    pub max_length: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct A2Scan {
    pub beta: f64,
    pub kind: A2WeightKind,
    pub levels: Vec<A2Level>,
    pub verdict: A2Verdict,
    /// Relative change between the last two levels.
    pub last_change: f64,
}

/// `int_u^v x^p dx` for `0 <= u < v`.
fn positive_power_integral(u: f64, v: f64, p: f64) -> f64 {
    if v <= u {
        return 0.0;
    }
    if (p + 1.0).abs() < 1e-14 {
        (v / u).ln()
    } else {
        (v.powf(p + 1.0) - u.powf(p + 1.0)) / (p + 1.0)
    }
}

/// `int_{[a,b] \ (-delta, delta)} |x|^p dx`.
fn power_integral(a: f64, b: f64, p: f64, delta: f64) -> f64 {
    let neg = if a < -delta {
        positive_power_integral(delta.max((-b).max(0.0)), -a, p)
    } else {
        0.0
    };
    let pos = if b > delta {
        positive_power_integral(delta.max(a.max(0.0)), b, p)
    } else {
        0.0
    };
    neg + pos
}

/// `int_a^b <x>^p dx` through `x = sinh t`, where the integrand becomes
/// `cosh^{p+1} t`.
fn bracket_integral(a: f64, b: f64, p: f64) -> f64 {
    let (ta, tb) = (a.asinh(), b.asinh());
    let pieces = ((tb - ta).ceil() as usize).max(1);
    let h = (tb - ta) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let lo = ta + i as f64 * h;
            quad::panel(lo, lo + h, |t| t.cosh().powf(p + 1.0))
        })
        .sum()
}

/// Dyadic interval family: lengths `R 2^-k` for `k = 0..=scales`, centers on
/// a quarter-length lattice within `|c| <= R/2`.
fn family(radius: f64, scales: u32) -> Vec<(f64, f64)> {
    (0..=scales)
        .flat_map(|k| {
            let len = radius * 0.5f64.powi(k as i32);
            let step = 0.25 * len;
            (-CENTER_STEPS..=CENTER_STEPS).filter_map(move |j| {
                let c = j as f64 * step;
                (c.abs() <= 0.5 * radius).then_some((c - 0.5 * len, c + 0.5 * len))
            })
        })
        .collect()
}

/// Sup of `avg_I w * avg_I w^{-1}` over the family of refinement `level`.
///
/// For `Power`, each level adds `SCALES_PER_LEVEL` smaller dyadic scales
/// below `radius`; when `w` or `w^{-1}` is not locally integrable the set
/// `|x| < radius 2^{-SCALES_PER_LEVEL (level+1)}` is excised, so the constant
/// measures the growth of the averages as the resolution refines. For
/// `Bracket`, each level multiplies the largest scale by
/// `2^SCALES_PER_LEVEL`, since that weight is singular only at infinity.
pub fn a2_constant(beta: f64, kind: A2WeightKind, level: usize, radius: f64) -> Result<A2Level> {
    if !(beta.is_finite() && radius > 0.0) {
        return Err(LabError::precondition("a2_constant", "need finite beta and radius > 0"));
    }
    let p = 2.0 * beta;
    let (intervals, min_length, max_length) = match kind {
        A2WeightKind::Power => {
            let scales = SCALES_PER_LEVEL * (level as u32 + 1);
            (family(radius, scales), radius * 0.5f64.powi(scales as i32), radius)
        }
        A2WeightKind::Bracket => {
            let r = radius * 2f64.powi((SCALES_PER_LEVEL * level as u32) as i32);
            (family(r, SCALES_PER_LEVEL), r * 0.5f64.powi(SCALES_PER_LEVEL as i32), r)
        }
    };
    let delta = match kind {
        A2WeightKind::Power if p.abs() >= 1.0 => min_length,
        _ => 0.0,
    };
    let constant = intervals
        .par_iter()
        .map(|&(a, b)| {
            let len = b - a;
            let (w, winv) = match kind {
                A2WeightKind::Power => (power_integral(a, b, p, delta), power_integral(a, b, -p, delta)),
                A2WeightKind::Bracket => (bracket_integral(a, b, p), bracket_integral(a, b, -p)),
            };
            w * winv / (len * len)
        })
        .reduce(|| 0.0, f64::max);
    Ok(A2Level {
        level,
        constant,
        min_length,
        max_length,
    })
}

/// Runs `levels` refinements and classifies the constant.
pub fn a2_scan(beta: f64, kind: A2WeightKind, levels: usize, radius: f64) -> Result<A2Scan> {
    if levels < DIVERGENCE_STEPS + 1 {
        return Err(LabError::precondition(
            "a2_scan",
            format!("need at least {} levels", DIVERGENCE_STEPS + 1),
        ));
    }
    let levels: Vec<A2Level> = (0..levels)
        .map(|l| a2_constant(beta, kind, l, radius))
        .collect::<Result<_>>()?;
    let c: Vec<f64> = levels.iter().map(|l| l.constant).collect();
    let k = c.len();
    let last_change = (c[k - 1] - c[k - 2]).abs() / c[k - 2];
    let tail = &c[k - 1 - DIVERGENCE_STEPS..];
    let growing = tail.windows(2).all(|w| w[1] >= DIVERGENCE_RATIO * w[0]);
    let steps: Vec<f64> = tail.windows(2).map(|w| w[1] - w[0]).collect();
    let sustained = steps.iter().all(|d| *d > INCREMENT_FLOOR * c[k - 1])
        && steps.windows(2).all(|w| w[1] >= SUSTAINED_RATIO * w[0]);
    let verdict = if growing || sustained {
        A2Verdict::Divergent
    } else if last_change <= PLATEAU_TOL {
        A2Verdict::Finite
    } else {
        A2Verdict::Undetermined
    };
    Ok(A2Scan {
        beta,
        kind,
        levels,
        verdict,
        last_change,
    })
}

/// The classification on the line: finite exactly for `|beta| < 1/2`.
pub fn expected_verdict(beta: f64) -> A2Verdict {
    if beta.abs() < 0.5 {
        A2Verdict::Finite
    } else {
        A2Verdict::Divergent
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_weight_gives_one() {
        let l = a2_constant(0.0, A2WeightKind::Power, 0, 1.0).unwrap();
        assert!((l.constant - 1.0).abs() < 1e-14);
        let l = a2_constant(0.0, A2WeightKind::Bracket, 0, 1.0).unwrap();
        assert!((l.constant - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_interval_closed_form() {
        // on [-h, h]: (1/(1+p)) (1/(1-p))
        let p: f64 = 0.8;
        let w = power_integral(-1.0, 1.0, p, 0.0) / 2.0;
        let winv = power_integral(-1.0, 1.0, -p, 0.0) / 2.0;
        assert!((w * winv - 1.0 / (1.0 - p * p)).abs() < 1e-13);
    }

    #[test]
    fn bracket_integral_matches_power_far_out() {
        let v = bracket_integral(0.0, 3.0, 2.0);
        assert!((v - (3.0 + 9.0)).abs() < 1e-12);
    }

    #[test]
    fn power_classification() {
        for beta in [-0.6, -0.5, -0.49, -0.4, -0.2, 0.2, 0.4, 0.49, 0.5, 0.6] {
            let scan = a2_scan(beta, A2WeightKind::Power, 5, 1.0).unwrap();
            assert_eq!(scan.verdict, expected_verdict(beta), "beta={beta}: {:?}", scan.levels);
        }
    }

    #[test]
    fn bracket_classification_clear_cases() {
        for beta in [-0.6, -0.4, -0.2, 0.2, 0.4, 0.6] {
            let scan = a2_scan(beta, A2WeightKind::Bracket, 5, 1.0).unwrap();
            let c: Vec<f64> = scan.levels.iter().map(|l| l.constant).collect();
            assert_eq!(scan.verdict, expected_verdict(beta), "beta={beta}: {c:?}");
        }
    }

    #[test]
    fn bracket_endpoints_resolve_with_more_levels() {
        for beta in [-0.5, -0.49, 0.49, 0.5] {
            let scan = a2_scan(beta, A2WeightKind::Bracket, 13, 1.0).unwrap();
            assert_eq!(scan.verdict, expected_verdict(beta), "beta={beta}: {}", scan.last_change);
        }
    }

    #[test]
    fn logarithmic_growth_is_divergent_at_any_depth() {
        for levels in [5, 8, 12] {
            let scan = a2_scan(0.5, A2WeightKind::Power, levels, 1.0).unwrap();
            assert_eq!(scan.verdict, A2Verdict::Divergent, "{levels} levels");
        }
    }

    #[test]
    fn family_refinement_is_monotone() {
        let scan = a2_scan(0.4, A2WeightKind::Power, 5, 1.0).unwrap();
        for w in scan.levels.windows(2) {
            assert!(w[1].constant >= w[0].constant * (1.0 - 1e-12));
        }
    }
}
