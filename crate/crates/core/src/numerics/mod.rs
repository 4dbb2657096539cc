//! Quadrature, bracketing root finding and interpolation used across the crate.

pub mod interp;
pub mod quad;
pub mod roots;

pub use interp::Pchip;
pub use quad::{integrate, integrate_tail, QuadResult, QuadTolerance};
pub use roots::bisect;

/// Fourth-order central difference of `f` at `x` with step `h`.
pub fn central_derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Geometric spacing of `n` points from `lo` to `hi` inclusive.
pub fn geometric_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln() / (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo * (ratio * i as f64).exp()
            }
        })
        .collect()
}

/// Uniform spacing of `n` points from `lo` to `hi` inclusive.
pub fn uniform_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect()
}
