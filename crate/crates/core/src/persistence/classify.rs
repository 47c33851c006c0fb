use std::fmt;

use serde::{Deserialize, Serialize};

/// Increment ratio below which the norm counts as converged.
pub const CONVERGED_RATIO: f64 = 0.9;
/// Increment ratio at or above which the norm counts as divergent.
pub const DIVERGENT_RATIO: f64 = 1.2;
/// Increments below this fraction of the squared norm count as zero.
pub const INCREMENT_FLOOR: f64 = 1e-13;
/// Relative size of sample rounding used for the absolute noise floor.
pub const SAMPLE_NOISE: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Persists,
    Diverges,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Persists => "PERSISTS",
            Verdict::Diverges => "DIVERGES",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Classification of one norm across the ladder.
#[derive(Debug, Clone, Serialize)]
pub struct LadderVerdict {
    pub norms_sq: Vec<f64>,
    /// Ratio of the last two increments; `None` when both vanish.
    pub rho: Option<f64>,
    pub verdict: Verdict,
}

/// Classifies squared norms measured on growing boxes.
///
/// Converged when the last increment is negligible or the last increment
/// ratio is below [`CONVERGED_RATIO`]; divergent when the norms grow at every
/// level and the last ratio is at least [`DIVERGENT_RATIO`]. Increments at or
/// below `noise` (absolute) or [`INCREMENT_FLOOR`] (relative) are negligible.
pub fn classify_ladder(norms_sq: &[f64], noise: f64) -> LadderVerdict {
    let k = norms_sq.len();
    let verdict_with = |rho, verdict| LadderVerdict {
        norms_sq: norms_sq.to_vec(),
        rho,
        verdict,
    };
    if k < 3 {
        return verdict_with(None, Verdict::Inconclusive);
    }
    let top = (INCREMENT_FLOOR * norms_sq[k - 1].abs()).max(noise).max(f64::MIN_POSITIVE);
    let d_prev = norms_sq[k - 2] - norms_sq[k - 3];
    let d_last = norms_sq[k - 1] - norms_sq[k - 2];
    if d_last.abs() <= top {
        let rho = (d_prev.abs() > top).then(|| d_last / d_prev);
        return verdict_with(rho, Verdict::Persists);
    }
    let rho = d_last / d_prev;
    let growing = norms_sq.windows(2).all(|w| w[1] > w[0]);
    let verdict = if d_prev.abs() <= top {
        // a negligible increment followed by a real one
        if growing { Verdict::Diverges } else { Verdict::Inconclusive }
    } else if rho.abs() < CONVERGED_RATIO {
        Verdict::Persists
    } else if rho >= DIVERGENT_RATIO && growing {
        Verdict::Diverges
    } else {
        Verdict::Inconclusive
    };
    verdict_with(Some(rho), verdict)
}

/// Combines verdicts over sampled times: persistence must hold at every
/// time, divergence at some time.
pub fn combine(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
    let v: Vec<Verdict> = verdicts.into_iter().collect();
    if v.is_empty() {
        Verdict::Inconclusive
    } else if v.iter().all(|&x| x == Verdict::Persists) {
        Verdict::Persists
    } else if v.contains(&Verdict::Diverges) {
        Verdict::Diverges
    } else {
        Verdict::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ladder(p: f64) -> Vec<f64> {
        // partial sums of a geometric series of increments with ratio p
        let mut s = vec![1.0];
        let mut d = 0.5;
        for _ in 0..3 {
            s.push(s.last().unwrap() + d);
            d *= p;
        }
        s
    }

    #[test]
    fn geometric_increments() {
        assert_eq!(classify_ladder(&ladder(0.25), 0.0).verdict, Verdict::Persists);
        assert_eq!(classify_ladder(&ladder(1.32), 0.0).verdict, Verdict::Diverges);
        assert_eq!(classify_ladder(&ladder(1.0), 0.0).verdict, Verdict::Inconclusive);
        assert_eq!(classify_ladder(&[1.0, 1.0, 1.0], 0.0).verdict, Verdict::Persists);
        assert_eq!(classify_ladder(&[1.0, 2.0], 0.0).verdict, Verdict::Inconclusive);
    }

    #[test]
    fn noise_level_increments_are_negligible() {
        let v = classify_ladder(&[7.0, 7.0 + 1e-12, 7.0 - 3e-11], 1e-10);
        assert_eq!(v.verdict, Verdict::Persists);
        assert_eq!(classify_ladder(&[7.0, 7.0 + 1e-12, 7.0 - 3e-11], 0.0).verdict, Verdict::Inconclusive);
    }

    #[test]
    fn shrinking_norms_never_diverge() {
        assert_ne!(classify_ladder(&[3.0, 2.0, 0.0], 0.0).verdict, Verdict::Diverges);
    }

    #[test]
    fn combination() {
        use Verdict::*;
        assert_eq!(combine([Persists, Persists]), Persists);
        assert_eq!(combine([Persists, Diverges]), Diverges);
        assert_eq!(combine([Persists, Inconclusive]), Inconclusive);
    }
}
