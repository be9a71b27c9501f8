//! The late-time resonance multiplier B: the exponential of a cutoff-gated
//! Lorentzian integral centered at the resonant time eta/k. Because the bare
//! Lorentzian integrates to pi, the scaled exponent never exceeds
//! pi / delta_b; the cap is enforced explicitly as well.

use super::cutoff::b_cutoff;
use crate::numerics::quad::adaptive_quad_split;
use crate::params::WeightParams;

/// Hard cap on the unscaled exponent integral (the full Lorentzian mass).
pub const B_EXPONENT_CAP: f64 = std::f64::consts::PI;

/// d/dt of log B: the instantaneous gated Lorentzian rate.
pub fn dlog_b_multiplier_dt(t: f64, k: i64, eta: f64, p: &WeightParams) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let d = t - eta / k as f64;
    b_cutoff(t, k, eta) / (p.delta_b * (1.0 + d * d))
}

/// The support of the integrand in s, intersected with [0, t]: empty unless
/// every gate can open. Returns (lo, hi) with lo < hi, or None.
fn support(t: f64, k: i64, eta: f64) -> Option<(f64, f64)> {
    if k == 0 || t <= 0.0 {
        return None;
    }
    let kf = k as f64;
    // chi(eta / k^3) is a fixed gate independent of s
    if (eta / kf.powi(3)).abs() >= 10.0 {
        return None;
    }
    // chi1(eta/(k s)) needs eta/(k s) in (1/3, 5/2) => s in (2 eta/(5k), 3 eta/k)
    let r = eta / kf;
    if r <= 0.0 {
        return None; // opposite signs (or eta = 0): the one-sided gate stays shut
    }
    // chi(100/s) needs s > 10; chi(eta/s^3) needs s^3 > |eta|/10
    let lo = (0.4 * r).max(10.0).max((eta.abs() / 10.0).cbrt());
    let hi = (3.0 * r).min(t);
    if lo < hi {
        Some((lo, hi))
    } else {
        None
    }
}

/// log B_k(t, eta): delta_b^{-1} times the integral of
/// b(s, k, eta) / (1 + (s - eta/k)^2) over s in [0, t]. Zero for k = 0.
pub fn b_multiplier_log(t: f64, k: i64, eta: f64, p: &WeightParams) -> f64 {
    let (lo, hi) = match support(t, k, eta) {
        Some(range) => range,
        None => return 0.0,
    };
    let center = eta / k as f64;
    let f = |s: f64| {
        let d = s - center;
        b_cutoff(s, k, eta) / (1.0 + d * d)
    };
    let pts = [lo, center.clamp(lo, hi), hi];
    let raw = adaptive_quad_split(&f, &pts, 1e-12, 1e-10).value;
    raw.clamp(0.0, B_EXPONENT_CAP) / p.delta_b
}
