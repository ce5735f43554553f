//! Quadrature on uniform grids with `n + 1` nodes and spacing `h`.

use alloc::vec;
use alloc::vec::Vec;

/// Composite Simpson over all nodes. An odd number of intervals closes
/// with Simpson's 3/8 rule on the last three; a single interval falls back
/// to the trapezoid rule.
pub fn integrate(values: &[f64], h: f64) -> f64 {
    let n = values.len().saturating_sub(1);
    match n {
        0 => 0.0,
        1 => 0.5 * h * (values[0] + values[1]),
        _ if n.is_multiple_of(2) => simpson_even(values, h),
        _ => simpson_even(&values[..n - 2], h) + three_eighths(&values[n - 3..], h),
    }
}

fn simpson_even(values: &[f64], h: f64) -> f64 {
    let n = values.len() - 1;
    debug_assert!(n.is_multiple_of(2));
    if n == 0 {
        return 0.0;
    }
    let mut s = values[0] + values[n];
    for (i, v) in values.iter().enumerate().take(n).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    s * h / 3.0
}

fn three_eighths(v: &[f64], h: f64) -> f64 {
    3.0 * h / 8.0 * (v[0] + 3.0 * v[1] + 3.0 * v[2] + v[3])
}

/// How the first interval is integrated by [`cumulative`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FirstCell {
    /// Quadratic through the first three nodes, weights `(5, 8, -1) h / 12`.
    Quadratic,
    /// Trapezoid; keeps every weight nonnegative so that the resulting
    /// linear map is order preserving.
    Trapezoid,
}

/// Running integrals `out[i] = int_0^{x_i}` of the sampled function.
///
/// Even nodes use composite Simpson, odd nodes `i >= 3` use Simpson up to
/// `i - 3` followed by the 3/8 rule, and node 1 follows `first`.
pub fn cumulative(values: &[f64], h: f64, first: FirstCell) -> Vec<f64> {
    let len = values.len();
    let mut out = vec![0.0; len];
    if len < 2 {
        return out;
    }
    out[1] = if len >= 3 && first == FirstCell::Quadratic {
        h / 12.0 * (5.0 * values[0] + 8.0 * values[1] - values[2])
    } else {
        0.5 * h * (values[0] + values[1])
    };
    let mut even = 0.0;
    let mut i = 2;
    while i < len {
        even += h / 3.0 * (values[i - 2] + 4.0 * values[i - 1] + values[i]);
        out[i] = even;
        i += 2;
    }
    let mut i = 3;
    while i < len {
        out[i] = out[i - 3] + three_eighths(&values[i - 3..=i], h);
        i += 2;
    }
    out
}

/// Running integrals `out[i] = int_{x_i}^1`, the mirror image of
/// [`cumulative`].
pub fn cumulative_from_right(values: &[f64], h: f64, first: FirstCell) -> Vec<f64> {
    let rev: Vec<f64> = values.iter().rev().copied().collect();
    let mut out = cumulative(&rev, h, first);
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..=n).map(|i| f(i as f64 / n as f64)).collect()
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        for n in [2usize, 3, 4, 7, 10] {
            let v = sample(n, |x| 1.0 + 2.0 * x - x * x + 4.0 * x * x * x);
            let exact = 1.0 + 1.0 - 1.0 / 3.0 + 1.0;
            assert!(
                (integrate(&v, 1.0 / n as f64) - exact).abs() < 1e-13,
                "n={n}"
            );
        }
    }

    #[test]
    fn cumulative_quadratic_is_exact_for_quadratics() {
        let n = 9;
        let h = 1.0 / n as f64;
        let v = sample(n, |x| 3.0 * x * x - x + 2.0);
        let c = cumulative(&v, h, FirstCell::Quadratic);
        for (i, ci) in c.iter().enumerate() {
            let x = i as f64 * h;
            let exact = x * x * x - 0.5 * x * x + 2.0 * x;
            assert!((ci - exact).abs() < 1e-13, "node {i}");
        }
    }

    #[test]
    fn cumulative_right_matches_total_minus_left() {
        let n = 12;
        let h = 1.0 / n as f64;
        let v = sample(n, libm::exp);
        let left = cumulative(&v, h, FirstCell::Quadratic);
        let right = cumulative_from_right(&v, h, FirstCell::Quadratic);
        let total = integrate(&v, h);
        assert!((right[0] - total).abs() < 1e-14);
        assert!((left[n] - total).abs() < 1e-14);
        assert!(right[n] == 0.0);
    }

    #[test]
    fn trapezoid_first_cell_keeps_weights_positive() {
        // a spike at node 2 must not produce a negative running integral at node 1
        let v = [0.0, 0.0, 1.0, 0.0, 0.0];
        let c = cumulative(&v, 0.25, FirstCell::Trapezoid);
        assert!(c.iter().all(|x| *x >= 0.0));
        let q = cumulative(&v, 0.25, FirstCell::Quadratic);
        assert!(q[1] < 0.0);
    }
}
