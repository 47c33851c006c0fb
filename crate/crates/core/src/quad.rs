//! Composite Gauss-Legendre quadrature.

use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};

const DEGREE: usize = 24;

/// Nodes and weights on `[-1, 1]`.
struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the
/// Legendre recurrence, weights twice the squared first eigenvector entries.
fn golub_welsch(n: usize) -> Rule {
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let b = kf / (4.0 * kf * kf - 1.0).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| golub_welsch(DEGREE))
}

/// `int_a^b f` with one fixed-degree panel.
pub fn panel(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let r = rule();
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    half * r
        .nodes
        .iter()
        .zip(&r.weights)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
}

/// `int f` over consecutive panels `[p_i, p_{i+1}]` of the sorted breakpoints.
pub fn panels(breaks: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| panel(w[0], w[1], &f))
        .sum()
}

/// Breakpoints on `[a, b]`, `0 < a < b`, growing geometrically by at most
/// `ratio`, merged with the extra points that fall inside.
pub fn geometric_breaks(a: f64, b: f64, ratio: f64, extra: &[f64]) -> Vec<f64> {
    let mut out = vec![a];
    let mut x = a;
    while x * ratio < b {
        x *= ratio;
        out.push(x);
    }
    out.push(b);
    out.extend(extra.iter().copied().filter(|&e| e > a && e < b));
    out.sort_by(f64::total_cmp);
    out.dedup_by(|p, q| (*p - *q).abs() <= 1e-14 * q.abs().max(1.0));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        let r = rule();
        assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn integrates_smooth_functions() {
        assert!((panel(0.0, 1.0, |x| x.powi(7)) - 0.125).abs() < 1e-15);
        let v = panels(&geometric_breaks(1.0, 1e6, 2.0, &[]), |x| x.powf(-1.5));
        assert!((v - 2.0 * (1.0 - 1e-3)).abs() < 1e-13);
    }
}
