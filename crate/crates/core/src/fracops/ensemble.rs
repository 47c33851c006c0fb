use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::spectral::{derivative, Complex64, Field, Grid};

/// Distribution of random test fields.
///
/// Fourier coefficients are independent complex Gaussians on the modes
/// `0 < |xi| <= band_cap`, the result is multiplied by
/// `exp(-(x/R)^8)` with `R = envelope_fraction * L`, and normalized in `L^2`.
/// The band cap is physical, so refining `n` at fixed `L` draws the same
/// function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleLaw {
    pub band_cap: f64,
    pub envelope_fraction: f64,
}

impl Default for EnsembleLaw {
    fn default() -> Self {
        EnsembleLaw {
            band_cap: 4.0,
            envelope_fraction: 0.125,
        }
    }
}

/// Reproducible generator for trial `trial` of a suite seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn normalized(f: Field) -> Field {
    let n = f.l2_norm();
    if n > 0.0 {
        f.scale(1.0 / n)
    } else {
        f
    }
}

fn envelope(grid: &Grid, law: &EnsembleLaw) -> Field {
    let r = law.envelope_fraction * grid.half_length();
    Field::from_fn(grid, |x| (-(x / r).powi(8)).exp())
}

/// One band-limited field, enveloped and unit-normalized.
pub fn random_band_limited(grid: &Grid, law: &EnsembleLaw, rng: &mut impl Rng) -> Field {
    let n = grid.n();
    let top = ((law.band_cap / grid.dxi()).floor() as usize).min(n / 3 - 1).max(1);
    let mut spec = vec![Complex64::new(0.0, 0.0); n];
    for k in 1..=top {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        spec[k] = Complex64::new(re, im);
        spec[n - k] = Complex64::new(re, -im);
    }
    let raw = Field::from_spectrum(grid, spec).expect("finite spectrum");
    normalized(raw.mul(&envelope(grid, law)))
}

/// As [`random_band_limited`] with the mass removed by subtracting a
/// multiple of the envelope.
pub fn random_mean_zero(grid: &Grid, law: &EnsembleLaw, rng: &mut impl Rng) -> Field {
    let f = random_band_limited(grid, law, rng);
    let env = envelope(grid, law);
    let c = f.integral() / env.integral();
    normalized(f.sub(&env.scale(c)))
}

/// Sum of 1 to 4 Gaussians with random signs, centers in `|c| <= L/32` and
/// widths in `[0.5, 2]`.
pub fn random_gaussian_mixture(grid: &Grid, rng: &mut impl Rng) -> Field {
    let k = rng.random_range(1..=4);
    let reach = grid.half_length() / 32.0;
    let parts: Vec<(f64, f64, f64)> = (0..k)
        .map(|_| {
            let a: f64 = StandardNormal.sample(rng);
            (a, rng.random_range(-reach..=reach), rng.random_range(0.5..=2.0))
        })
        .collect();
    normalized(Field::from_fn(grid, |x| {
        parts
            .iter()
            .map(|&(a, c, w)| a * (-((x - c) / w).powi(2)).exp())
            .sum()
    }))
}

/// Derivative of a Gaussian mixture: exactly mean-zero.
pub fn random_dipole(grid: &Grid, rng: &mut impl Rng) -> Field {
    normalized(derivative(&random_gaussian_mixture(grid, rng), 1))
}

/// Measured ratios of one inequality over an ensemble.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioEnsemble {
    pub inequality_id: String,
    pub trials: usize,
    pub seed: u64,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
}

impl RatioEnsemble {
    pub fn from_ratios(inequality_id: impl Into<String>, seed: u64, ratios: Vec<f64>) -> Result<Self> {
        let inequality_id = inequality_id.into();
        if let Some(bad) = ratios.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
            return Err(LabError::Audit {
                what: inequality_id,
                reason: format!("ratio {bad} is not finite and nonnegative"),
            });
        }
        let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
        Ok(RatioEnsemble {
            inequality_id,
            trials: ratios.len(),
            seed,
            ratios,
            max_ratio,
        })
    }

    /// Concatenates two ensembles of the same inequality.
    pub fn merge(mut self, other: RatioEnsemble) -> RatioEnsemble {
        self.ratios.extend(other.ratios);
        self.trials = self.ratios.len();
        self.max_ratio = self.max_ratio.max(other.max_ratio);
        self
    }

    /// Relative change of `max_ratio` against another ensemble.
    pub fn drift(&self, other: &RatioEnsemble) -> f64 {
        (self.max_ratio - other.max_ratio).abs() / self.max_ratio.max(other.max_ratio)
    }
}

/// Runs `trials` independent trials in parallel. Trial `i` draws from
/// `trial_rng(seed, i)`, so results do not depend on scheduling.
pub fn run_ensemble<F>(id: &str, seed: u64, trials: usize, trial: F) -> Result<RatioEnsemble>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    let ratios = (0..trials as u64)
        .into_par_iter()
        .map(|i| trial(&mut trial_rng(seed, i)))
        .collect::<Result<Vec<f64>>>()?;
    RatioEnsemble::from_ratios(id, seed, ratios)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::is_mean_zero;

    #[test]
    fn same_seed_same_field() {
        let g = Grid::new(512, 64.0).unwrap();
        let a = random_band_limited(&g, &EnsembleLaw::default(), &mut trial_rng(7, 3));
        let b = random_band_limited(&g, &EnsembleLaw::default(), &mut trial_rng(7, 3));
        assert_eq!(a.samples(), b.samples());
        let c = random_band_limited(&g, &EnsembleLaw::default(), &mut trial_rng(7, 4));
        assert_ne!(a.samples(), c.samples());
    }

    #[test]
    fn refinement_draws_the_same_function() {
        let law = EnsembleLaw::default();
        let g1 = Grid::new(512, 64.0).unwrap();
        let g2 = Grid::new(1024, 64.0).unwrap();
        let a = random_band_limited(&g1, &law, &mut trial_rng(1, 0));
        let b = random_band_limited(&g2, &law, &mut trial_rng(1, 0));
        for j in 0..g1.n() {
            assert!((a.samples()[j] - b.samples()[2 * j]).abs() < 1e-12);
        }
    }

    #[test]
    fn fields_are_normalized_and_compact() {
        let g = Grid::new(1024, 64.0).unwrap();
        let mut rng = trial_rng(11, 0);
        for f in [
            random_band_limited(&g, &EnsembleLaw::default(), &mut rng),
            random_mean_zero(&g, &EnsembleLaw::default(), &mut rng),
            random_gaussian_mixture(&g, &mut rng),
            random_dipole(&g, &mut rng),
        ] {
            assert!((f.l2_norm() - 1.0).abs() < 1e-12);
            assert!(f.sup_outside(16.0) < 1e-13);
        }
        assert!(is_mean_zero(&random_mean_zero(&g, &EnsembleLaw::default(), &mut rng)));
        assert!(is_mean_zero(&random_dipole(&g, &mut rng)));
    }

    #[test]
    fn ensemble_rejects_nan() {
        assert!(run_ensemble("x", 0, 4, |_| Ok(f64::NAN)).is_err());
        let e = run_ensemble("x", 0, 4, |r| Ok(r.random::<f64>())).unwrap();
        assert_eq!(e.trials, 4);
        assert!(e.max_ratio <= 1.0);
    }
}
