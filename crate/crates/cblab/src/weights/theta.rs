//! The resonance-growth weight Theta: a backward-in-time piecewise power-law
//! construction over the bar intervals, with an extra resonant factor on a
//! mode's own critical interval. All values are carried as logarithms.

use super::assembled::{WeightEvaluation, WeightRegime};
use super::intervals::{critical_interval, integer_part};
use crate::params::WeightParams;

/// log Theta_NR at the top (t >= t_j^+) of each bar interval, index j = 1..N,
/// plus the frozen pre-window value at index N+1. Index 0 is unused.
///
/// Walking backward from Theta = 1 at t >= 2 eta, crossing bar interval j
/// divides the weight by (eta/j^3)^{ck} (resonant flank) and by
/// (1 + a_j (eta/j - t_b))^{1+ck} (non-resonant flank), with the flank start
/// t_b clipped to the bar interval; only j = 1 ever clips.
pub(crate) fn log_plateaus(eta: f64, ck: f64) -> Vec<f64> {
    let n = integer_part(eta.powf(1.0 / 3.0)).expect("eta >= 0") as usize;
    let mut log_s = vec![0.0; n + 2];
    for j in 1..=n {
        let jf = j as f64;
        let aj = 2.0 * (1.0 - jf.powi(3) / eta);
        let bar_lo = 2.0 * eta / (2.0 * jf + 1.0);
        let t_minus = eta / jf - eta / (2.0 * jf.powi(3));
        let t_b = t_minus.max(bar_lo);
        let drop_r = ck * (eta / jf.powi(3)).ln();
        let drop_l = (1.0 + ck) * (1.0 + aj * (eta / jf - t_b)).ln();
        log_s[j + 1] = log_s[j] - drop_r - drop_l;
    }
    log_s
}

/// Which bar interval contains t (clamped to [1, n]).
fn bar_index(t: f64, eta: f64, n: usize) -> usize {
    ((eta / t + 0.5).floor() as usize).clamp(1, n)
}

/// log Theta_NR(t, eta) for eta >= 0.
pub fn log_theta_nr(t: f64, eta: f64, ck: f64) -> f64 {
    if eta < 1.0 || t >= 2.0 * eta {
        return 0.0;
    }
    let log_s = log_plateaus(eta, ck);
    let n = log_s.len() - 2;
    let t_freeze = 2.0 * eta / (2.0 * n as f64 + 1.0);
    if t < t_freeze {
        return log_s[n + 1];
    }
    let j = bar_index(t, eta, n);
    let jf = j as f64;
    let aj = 2.0 * (1.0 - jf.powi(3) / eta);
    let t_res = eta / jf;
    let half = eta / (2.0 * jf.powi(3));
    if t >= t_res + half {
        log_s[j]
    } else if t >= t_res {
        log_s[j] + ck * ((jf.powi(3) / eta).ln() + (1.0 + aj * (t - t_res)).ln())
    } else if t <= t_res - half {
        log_s[j + 1]
    } else {
        log_s[j] - ck * (eta / jf.powi(3)).ln() - (1.0 + ck) * (1.0 + aj * (t_res - t)).ln()
    }
}

/// d/dt of log Theta_NR(t, eta); zero on plateaus and outside the window.
pub fn dlog_theta_nr_dt(t: f64, eta: f64, ck: f64) -> f64 {
    if eta < 1.0 || t >= 2.0 * eta {
        return 0.0;
    }
    let n = integer_part(eta.powf(1.0 / 3.0)).expect("eta >= 0") as usize;
    if n == 0 || t < 2.0 * eta / (2.0 * n as f64 + 1.0) {
        return 0.0;
    }
    let j = bar_index(t, eta, n);
    let jf = j as f64;
    let aj = 2.0 * (1.0 - jf.powi(3) / eta);
    let t_res = eta / jf;
    let half = eta / (2.0 * jf.powi(3));
    if t >= t_res + half || t <= t_res - half {
        0.0
    } else if t >= t_res {
        ck * aj / (1.0 + aj * (t - t_res))
    } else {
        (1.0 + ck) * aj / (1.0 + aj * (t_res - t))
    }
}

/// Evaluates Theta for mode (k, eta) at time t: the non-resonant weight with
/// the resonant multiplicative factor (k^3/eta)(1 + a|t - eta/k|) applied on
/// the mode's own critical interval. Negative arguments use the symmetry
/// extension: Theta_k(t, eta) = Theta_{|k|}(t, |eta|) when eta k > 0, and the
/// plain non-resonant weight when eta k < 0 or either index is zero.
pub fn theta_weight(t: f64, k: i64, eta: f64, p: &WeightParams) -> WeightEvaluation {
    let ck = p.ck();
    let ae = eta.abs();
    if ae < 1.0 || t >= 2.0 * ae {
        return WeightEvaluation {
            log_value: 0.0,
            d_log_dt: 0.0,
            regime: WeightRegime::PostWindow,
        };
    }
    let n = integer_part(ae.powf(1.0 / 3.0)).expect("|eta| >= 0") as usize;
    let t_freeze = 2.0 * ae / (2.0 * n as f64 + 1.0);
    let mut log_value = log_theta_nr(t, ae, ck);
    let mut d_log_dt = dlog_theta_nr_dt(t, ae, ck);
    let mut regime = if t < t_freeze {
        WeightRegime::PreWindow
    } else {
        WeightRegime::NonResonant
    };
    // The resonant factor applies only on the mode's own interval, which
    // exists only for eta k > 0 with |k| within the cube-root cutoff.
    if k != 0 && eta != 0.0 && eta * (k as f64) > 0.0 {
        if let Some(iv) = critical_interval(k, eta).expect("k != 0") {
            if iv.contains(t) {
                let ak = k.abs() as f64;
                let a = 2.0 * (1.0 - ak.powi(3) / ae);
                let tau = t - ae / ak;
                log_value += (ak.powi(3) / ae).ln() + (1.0 + a * tau.abs()).ln();
                d_log_dt += if tau >= 0.0 {
                    a / (1.0 + a * tau)
                } else {
                    -a / (1.0 + a * (-tau))
                };
                regime = WeightRegime::Resonant;
            }
        }
    }
    WeightEvaluation {
        log_value,
        d_log_dt,
        regime,
    }
}
