//! Riemann zeta on the real line.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

/// `B_{2m} / (2m)!` for `m = 1..=7`.
const BERNOULLI_OVER_FACTORIAL: [f64; 7] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
];

const EM_CUTOFF: usize = 16;

/// True when `x` is a negative even integer, a trivial zero of zeta.
pub fn is_trivial_zero(x: f64) -> bool {
    let r = x.round();
    x < 0.0 && (x - r).abs() < 1e-12 && (r as i64) % 2 == 0
}

/// `zeta(x)` for real `x != 1`.
///
/// Euler-Maclaurin summation for `x >= 1/2`, the functional equation below.
pub fn zeta(x: f64) -> f64 {
    if x == 1.0 {
        return f64::INFINITY;
    }
    if x == 0.0 {
        return -0.5;
    }
    if x >= 0.5 {
        return zeta_em(x);
    }
    if is_trivial_zero(x) {
        return 0.0;
    }
    let w = 1.0 - x;
    2.0 * (2.0 * PI).powf(-w) * (0.5 * PI * x).sin() * gamma(w) * zeta_em(w)
}

fn zeta_em(x: f64) -> f64 {
    let nf = EM_CUTOFF as f64;
    let head: f64 = (1..EM_CUTOFF).map(|k| (k as f64).powf(-x)).sum();
    let mut sum = head + nf.powf(1.0 - x) / (x - 1.0) + 0.5 * nf.powf(-x);
    // rising product x (x+1) ... (x+2m-2), times N^{-x-2m+1}
    let mut factor = x * nf.powf(-x - 1.0);
    for (m, c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        sum += c * factor;
        let k = 2.0 * (m as f64 + 1.0);
        factor *= (x + k - 1.0) * (x + k) / (nf * nf);
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn known_values() {
        assert!(close(zeta(2.0), PI * PI / 6.0, 1e-14));
        assert!(close(zeta(4.0), PI.powi(4) / 90.0, 1e-14));
        assert!(close(zeta(0.0), -0.5, 1e-14));
        assert!(close(zeta(-1.0), -1.0 / 12.0, 1e-13));
        assert!(close(zeta(-3.0), 1.0 / 120.0, 1e-13));
        assert!(close(zeta(0.5), -1.4603545088095868, 1e-13));
        assert!(close(zeta(-0.5), -0.207886224977355, 1e-12));
        assert!(close(zeta(-2.5), 0.00851692877785033, 1e-12));
        assert!(close(zeta(3.5), 1.1267338673170566, 1e-14));
        assert_eq!(zeta(-2.0), 0.0);
        assert_eq!(zeta(-10.0), 0.0);
    }

    #[test]
    fn large_arguments_tend_to_one() {
        assert!(close(zeta(40.0), 1.0 + 2f64.powi(-40), 1e-15));
    }
}
