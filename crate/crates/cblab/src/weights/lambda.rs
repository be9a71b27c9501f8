//! The time-dependent regularity radius lambda(t): constant up to t = 1,
//! then 1 + lambda(t) decays by the exponential of a calibrated integral of
//! <tau>^{-2 q_tilde}, so that lambda(t) approaches a designed limit strictly
//! above lambda_prime.

use crate::numerics::quad::adaptive_quad_split;
use crate::params::WeightParams;

/// Integral of (1 + tau^2)^{-q_tilde} from 1 to t (t >= 1), with decade
/// split points so the adaptive panels track the algebraic decay.
fn radius_decay_integral(t: f64, q_tilde: f64) -> f64 {
    if t <= 1.0 {
        return 0.0;
    }
    let mut pts = vec![1.0];
    let mut mark = 10.0;
    while mark < t {
        pts.push(mark);
        mark *= 10.0;
    }
    pts.push(t);
    let f = |tau: f64| (1.0 + tau * tau).powf(-q_tilde);
    adaptive_quad_split(&f, &pts, 1e-14, 1e-12).value
}

/// lambda(t).
pub fn lambda_of_t(t: f64, p: &WeightParams) -> f64 {
    let lam1 = p.lambda_at_one();
    if t <= 1.0 {
        return lam1;
    }
    let integral = radius_decay_integral(t, p.q_tilde);
    (1.0 + lam1) * (-p.delta_lambda * integral).exp() - 1.0
}

/// d lambda / dt: zero up to t = 1, then -delta_lambda <t>^{-2 q_tilde} (1 + lambda).
pub fn lambda_dot(t: f64, p: &WeightParams) -> f64 {
    if t <= 1.0 {
        return 0.0;
    }
    -p.delta_lambda * (1.0 + t * t).powf(-p.q_tilde) * (1.0 + lambda_of_t(t, p))
}
