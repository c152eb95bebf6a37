//! Cumulative quadrature on sampled grids and fixed-order Gauss–Legendre.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

/// Running integral `F[i] = ∫_{x[0]}^{x[i]} y dx` using piecewise cubics
/// through four neighbouring samples (fourth order on smooth data).
///
/// Falls back to the trapezoidal rule when fewer than four samples exist.
pub fn cumulative(x: &[f64], y: &[f64]) -> Vec<f64> {
    assert_eq!(x.len(), y.len(), "abscissa/ordinate length mismatch");
    let n = x.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n < 4 {
        for i in 1..n {
            out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
        }
        return out;
    }
    for i in 0..n - 1 {
        // stencil of four points containing [x_i, x_{i+1}]
        let j0 = if i == 0 { 0 } else if i + 2 >= n { n - 4 } else { i - 1 };
        let seg = cubic_segment_integral(&x[j0..j0 + 4], &y[j0..j0 + 4], x[i], x[i + 1]);
        out[i + 1] = out[i] + seg;
    }
    out
}

/// Same as [`cumulative`] but anchored so that the returned integral is zero
/// at `x0` (which must lie inside the grid).
pub fn cumulative_from(x: &[f64], y: &[f64], x0: f64) -> Vec<f64> {
    let mut out = cumulative(x, y);
    let shift = interpolate_cubic(x, &out, x0);
    for v in &mut out {
        *v -= shift;
    }
    out
}

/// Cubic Lagrange interpolation of sampled data at `x0`.
pub fn interpolate_cubic(x: &[f64], y: &[f64], x0: f64) -> f64 {
    let n = x.len();
    assert!(n >= 4, "need at least four samples");
    let i = x.partition_point(|&v| v <= x0).clamp(1, n - 1) - 1;
    let j0 = i.saturating_sub(1).min(n - 4);
    let xs = &x[j0..j0 + 4];
    let ys = &y[j0..j0 + 4];
    (0..4)
        .map(|k| {
            let mut l = 1.0;
            for m in 0..4 {
                if m != k {
                    l *= (x0 - xs[m]) / (xs[k] - xs[m]);
                }
            }
            l * ys[k]
        })
        .sum()
}

fn cubic_segment_integral(xs: &[f64], ys: &[f64], a: f64, b: f64) -> f64 {
    // Integrate the Lagrange interpolant exactly with two-point Gauss.
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let g = half / 3f64.sqrt();
    let eval = |x0: f64| -> f64 {
        (0..4)
            .map(|k| {
                let mut l = 1.0;
                for m in 0..4 {
                    if m != k {
                        l *= (x0 - xs[m]) / (xs[k] - xs[m]);
                    }
                }
                l * ys[k]
            })
            .sum()
    };
    half * (eval(mid - g) + eval(mid + g))
}

/// Fixed-order Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre<F: Fn(f64) -> f64>(order: usize, a: f64, b: f64, f: F) -> f64 {
    let degree = NonZeroUsize::new(order).expect("Gauss–Legendre order must be positive");
    GaussLegendre::new(degree).integrate(a, b, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cubic_is_exact() {
        let x: Vec<f64> = (0..11).map(|i| 0.3 * i as f64 + 0.01 * (i * i) as f64).collect();
        let y: Vec<f64> = x.iter().map(|&v| 2.0 * v * v * v - v + 1.0).collect();
        let f = cumulative(&x, &y);
        for (xi, fi) in x.iter().zip(&f) {
            let exact = 0.5 * xi.powi(4) - 0.5 * xi * xi + xi;
            assert_relative_eq!(*fi, exact, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn fourth_order_convergence() {
        let err = |n: usize| {
            let x: Vec<f64> = (0..=n).map(|i| 3.0 * i as f64 / n as f64).collect();
            let y: Vec<f64> = x.iter().map(|v| v.sin()).collect();
            (cumulative(&x, &y)[n] - (1.0 - 3f64.cos())).abs()
        };
        let ratio = err(40) / err(80);
        assert!(ratio > 12.0, "ratio {ratio}");
    }

    #[test]
    fn anchored_integral_vanishes_at_anchor() {
        let x: Vec<f64> = (0..50).map(|i| -2.0 + 0.1 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        let f = cumulative_from(&x, &y, 0.0);
        assert!(interpolate_cubic(&x, &f, 0.0).abs() < 1e-14);
        assert_relative_eq!(f[0], (-2f64).exp() - 1.0, max_relative = 1e-5);
    }

    #[test]
    fn gauss_legendre_polynomial() {
        let v = gauss_legendre(8, -1.0, 2.0, |x| x.powi(7) - x);
        let exact = (2f64.powi(8) - 1.0) / 8.0 - (4.0 - 1.0) / 2.0;
        assert_relative_eq!(v, exact, max_relative = 1e-13);
    }
}
