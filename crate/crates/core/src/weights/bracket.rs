/// `<x> = sqrt(1 + x^2)` and its first four derivatives.
pub fn bracket_derivatives(x: f64) -> [f64; 5] {
    let w2 = 1.0 + x * x;
    let w = w2.sqrt();
    [
        w,
        x / w,
        1.0 / (w * w2),
        -3.0 * x / (w * w2 * w2),
        (12.0 * x * x - 3.0) / (w * w2 * w2 * w2),
    ]
}

/// Derivatives of `b^m` up to order four, given `b, b', ..., b''''`.
pub fn power_derivatives(b: [f64; 5], m: f64) -> [f64; 5] {
    let [w, d1, d2, d3, d4] = b;
    let p = |k: f64| w.powf(m - k);
    let (m1, m2, m3) = (m * (m - 1.0), m * (m - 1.0) * (m - 2.0), m * (m - 1.0) * (m - 2.0) * (m - 3.0));
    [
        p(0.0),
        m * p(1.0) * d1,
        m1 * p(2.0) * d1 * d1 + m * p(1.0) * d2,
        m2 * p(3.0) * d1.powi(3) + 3.0 * m1 * p(2.0) * d1 * d2 + m * p(1.0) * d3,
        m3 * p(4.0) * d1.powi(4)
            + 6.0 * m2 * p(3.0) * d1 * d1 * d2
            + m1 * p(2.0) * (3.0 * d2 * d2 + 4.0 * d1 * d3)
            + m * p(1.0) * d4,
    ]
}

/// Derivatives of `<x>^m` up to order four.
pub fn bracket_pow_derivatives(x: f64, m: f64) -> [f64; 5] {
    power_derivatives(bracket_derivatives(x), m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for &m in &[-1.5, 0.3, 0.8, 2.0, 5.0] {
            for &x in &[-3.0, -0.4, 0.0, 0.7, 12.0] {
                let d = bracket_pow_derivatives(x, m);
                for k in 0..4 {
                    let num = fd(|y| bracket_pow_derivatives(y, m)[k], x, 1e-3);
                    let scale = d[k + 1].abs().max(1e-3 * d[0].abs());
                    assert!((num - d[k + 1]).abs() <= 1e-6 * scale.max(1.0), "m={m} x={x} k={k}");
                }
            }
        }
    }
}
