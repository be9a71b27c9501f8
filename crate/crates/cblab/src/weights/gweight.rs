//! The echo-chain weight g: piecewise-arctan growth across the bar intervals,
//! frozen below the last constructed interval and equal to 1 after the
//! window closes. All arithmetic is done on log g.

use super::assembled::{WeightEvaluation, WeightRegime};
use super::intervals::integer_part;
use crate::params::WeightParams;

/// Interval coefficient c_j: 1 up to the cube-root cutoff, eta/j^3 beyond it
/// (intervals are constructed up to j = E(eta^{2/3})).
fn coefficient(j: usize, eta: f64, n_cube: usize) -> f64 {
    if j <= n_cube {
        1.0
    } else {
        eta / (j as f64).powi(3)
    }
}

/// Full drop of interval j: arctan(eta/(j(2j+1))) + arctan(eta/(j(2j-1))).
fn interval_drop(j: usize, eta: f64) -> f64 {
    let jf = j as f64;
    (eta / (jf * (2.0 * jf + 1.0))).atan() + (eta / (jf * (2.0 * jf - 1.0))).atan()
}

/// Closed-form log(1/g(0, eta)) for eta >= 1: the delta_l-scaled sum of all
/// interval drops with their coefficients.
pub fn log_one_over_g_zero(eta: f64, p: &WeightParams) -> f64 {
    let ae = eta.abs();
    if ae < 1.0 {
        return 0.0;
    }
    let n_cube = integer_part(ae.powf(1.0 / 3.0)).expect("|eta| >= 0") as usize;
    let n_all = integer_part(ae.powf(2.0 / 3.0)).expect("|eta| >= 0") as usize;
    let mut total = 0.0;
    for j in 1..=n_all {
        total += coefficient(j, ae, n_cube) * interval_drop(j, ae);
    }
    total / p.delta_l
}

/// log g(t, eta); even in eta, identically 0 for |eta| < 1 or t >= 2|eta|.
pub fn log_g(t: f64, eta: f64, p: &WeightParams) -> f64 {
    let ae = eta.abs();
    if ae < 1.0 || t >= 2.0 * ae {
        return 0.0;
    }
    let n_cube = integer_part(ae.powf(1.0 / 3.0)).expect("|eta| >= 0") as usize;
    let n_all = integer_part(ae.powf(2.0 / 3.0)).expect("|eta| >= 0") as usize;
    let t_freeze = 2.0 * ae / (2.0 * n_all as f64 + 1.0);
    let j_stop = if t < t_freeze {
        n_all + 1
    } else {
        ((ae / t + 0.5).floor() as usize).clamp(1, n_all)
    };
    // accumulated drop of all intervals fully crossed walking backward from 1
    let mut log_value = 0.0;
    for j in 1..j_stop {
        log_value -= coefficient(j, ae, n_cube) * interval_drop(j, ae) / p.delta_l;
    }
    if j_stop <= n_all {
        // partial progress within interval j_stop
        let jf = j_stop as f64;
        let cj = coefficient(j_stop, ae, n_cube);
        let partial = (t - ae / jf).atan() - (ae / (jf * (2.0 * jf - 1.0))).atan();
        log_value += cj * partial / p.delta_l;
    }
    log_value
}

/// d/dt of log g: the Lorentzian growth rate of the interval containing t.
pub fn dlog_g_dt(t: f64, eta: f64, p: &WeightParams) -> f64 {
    let ae = eta.abs();
    if ae < 1.0 || t >= 2.0 * ae {
        return 0.0;
    }
    let n_cube = integer_part(ae.powf(1.0 / 3.0)).expect("|eta| >= 0") as usize;
    let n_all = integer_part(ae.powf(2.0 / 3.0)).expect("|eta| >= 0") as usize;
    if t < 2.0 * ae / (2.0 * n_all as f64 + 1.0) {
        return 0.0;
    }
    let j = ((ae / t + 0.5).floor() as usize).clamp(1, n_all);
    let cj = coefficient(j, ae, n_cube);
    let d = t - ae / j as f64;
    cj / (p.delta_l * (1.0 + d * d))
}

/// Evaluates g as a weight record.
pub fn g_weight(t: f64, eta: f64, p: &WeightParams) -> WeightEvaluation {
    let ae = eta.abs();
    if ae < 1.0 || t >= 2.0 * ae {
        return WeightEvaluation {
            log_value: 0.0,
            d_log_dt: 0.0,
            regime: WeightRegime::PostWindow,
        };
    }
    let n_all = integer_part(ae.powf(2.0 / 3.0)).expect("|eta| >= 0") as usize;
    let regime = if t < 2.0 * ae / (2.0 * n_all as f64 + 1.0) {
        WeightRegime::PreWindow
    } else {
        WeightRegime::NonResonant
    };
    WeightEvaluation {
        log_value: log_g(t, eta, p),
        d_log_dt: dlog_g_dt(t, eta, p),
        regime,
    }
}
