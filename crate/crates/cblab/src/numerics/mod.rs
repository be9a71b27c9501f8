//! Shared numerical kernels: adaptive quadrature, an embedded Runge–Kutta
//! integrator, and least-squares rate fitting.

pub mod fit;
pub mod ode;
pub mod quad;

/// `n` evenly spaced points from `a` to `b` inclusive (matches the usual
/// `start + i * step` construction with the endpoint pinned exactly).
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "need at least the two endpoints");
    let step = (b - a) / (n - 1) as f64;
    let mut out: Vec<f64> = (0..n).map(|i| a + i as f64 * step).collect();
    out[n - 1] = b;
    out
}

/// `n` logarithmically spaced points from `a` to `b` inclusive; requires
/// positive endpoints.
pub fn geomspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(a > 0.0 && b > 0.0, "geometric spacing needs positive endpoints");
    let la = a.ln();
    let lb = b.ln();
    let mut out: Vec<f64> = linspace(la, lb, n).into_iter().map(f64::exp).collect();
    out[0] = a;
    out[n - 1] = b;
    out
}
