//! Assembly of the full mode weight
//!
//!   A = exp(lambda(t) (|k|+|eta|)^s) <k,eta>^sigma J M B
//!
//! where J and M are two-term combinations carrying the reciprocal of the
//! resonance weights Theta and g respectively, and B is the late-time
//! multiplier. Every factor is combined in log space: the leading exponents
//! scale like |eta|^{1/3} with large coefficients, so the linear-space value
//! can overflow even when every quantity of interest (ratios, weighted
//! sums over modest frequency boxes) is perfectly representable.

use super::bfactor::{b_multiplier_log, dlog_b_multiplier_dt};
use super::gweight::{dlog_g_dt, log_g};
use super::lambda::lambda_of_t;
use super::theta::theta_weight;
use crate::params::WeightParams;

/// Where the evaluation time sits relative to a weight's active window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightRegime {
    /// Before the active window: the weight is frozen at its smallest value.
    PreWindow,
    /// Inside the window, away from the mode's own critical interval.
    NonResonant,
    /// Inside the mode's own critical interval.
    Resonant,
    /// After the window closes (or the frequency is too small to matter):
    /// the weight is identically 1.
    PostWindow,
}

/// One weight evaluation: the log value, its one-sided time derivative, and
/// the regime label.
#[derive(Debug, Clone, Copy)]
pub struct WeightEvaluation {
    pub log_value: f64,
    pub d_log_dt: f64,
    pub regime: WeightRegime,
}

impl WeightEvaluation {
    /// The weight itself (may overflow to 0 or infinity for extreme
    /// frequencies; callers needing large dynamic range use `log_value`).
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

/// log(exp(a) + exp(b)) without leaving log space.
pub(crate) fn log_sum_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// The l1 frequency modulus |k| + |eta|.
fn modulus(k: i64, eta: f64) -> f64 {
    k.unsigned_abs() as f64 + eta.abs()
}

/// log J_k(t, eta) = log( e^{mu |eta|^{1/3}} / Theta_k + e^{mu |k|^{1/3}} ).
pub fn j_log(t: f64, k: i64, eta: f64, p: &WeightParams) -> f64 {
    let theta = theta_weight(t, k, eta, p);
    let term_eta = p.mu * eta.abs().powf(1.0 / 3.0) - theta.log_value;
    let term_k = p.mu * (k.unsigned_abs() as f64).powf(1.0 / 3.0);
    log_sum_exp(term_eta, term_k)
}

/// log M_k(t, eta): same structure as J with coefficient 4 pi / delta_l and
/// the echo weight g in place of Theta.
pub fn m_log(t: f64, k: i64, eta: f64, p: &WeightParams) -> f64 {
    let c = 4.0 * std::f64::consts::PI / p.delta_l;
    let term_eta = c * eta.abs().powf(1.0 / 3.0) - log_g(t, eta, p);
    let term_k = c * (k.unsigned_abs() as f64).powf(1.0 / 3.0);
    log_sum_exp(term_eta, term_k)
}

/// Everything the energy bookkeeping needs about one mode's weight: the log
/// of A and the per-factor rate channels. The fractions are the relative
/// size of the resonance-carrying term inside J (respectively M); the rate
/// of log A through that factor is minus fraction times the resonance
/// weight's own log-derivative.
#[derive(Debug, Clone, Copy)]
pub struct ModeWeight {
    pub log_a: f64,
    /// weight of the Theta-carrying term inside J, in [0, 1]
    pub frac_theta: f64,
    pub dlog_theta_dt: f64,
    /// weight of the g-carrying term inside M, in [0, 1]
    pub frac_g: f64,
    pub dlog_g_dt: f64,
    /// d/dt log B (nonnegative)
    pub dlog_b_dt: f64,
    /// the l1 modulus |k| + |eta|
    pub modulus: f64,
    /// the Gevrey exponent s, carried so rate queries need no params
    pub s_exponent: f64,
}

impl ModeWeight {
    /// Total d/dt of log A given d lambda/dt at the same time.
    pub fn d_log_a_dt(&self, lam_dot: f64) -> f64 {
        lam_dot * self.modulus.powf(self.s_exponent)
            - self.frac_theta * self.dlog_theta_dt
            - self.frac_g * self.dlog_g_dt
            + self.dlog_b_dt
    }
}

/// Evaluates the full weight for one mode, taking lambda(t) as an argument
/// so sweeps over many modes at a fixed time pay for the radius quadrature
/// once.
pub fn mode_weight(t: f64, k: i64, eta: f64, lam: f64, p: &WeightParams) -> ModeWeight {
    let n = modulus(k, eta);
    let bracket_log = 0.5 * (1.0 + n * n).ln();

    let theta = theta_weight(t, k, eta, p);
    let j_eta = p.mu * eta.abs().powf(1.0 / 3.0) - theta.log_value;
    let j_k = p.mu * (k.unsigned_abs() as f64).powf(1.0 / 3.0);
    let jl = log_sum_exp(j_eta, j_k);

    let c = 4.0 * std::f64::consts::PI / p.delta_l;
    let m_eta = c * eta.abs().powf(1.0 / 3.0) - log_g(t, eta, p);
    let m_k = c * (k.unsigned_abs() as f64).powf(1.0 / 3.0);
    let ml = log_sum_exp(m_eta, m_k);

    let bl = b_multiplier_log(t, k, eta, p);

    ModeWeight {
        log_a: lam * n.powf(p.s) + p.sigma * bracket_log + jl + ml + bl,
        frac_theta: (j_eta - jl).exp(),
        dlog_theta_dt: theta.d_log_dt,
        frac_g: (m_eta - ml).exp(),
        dlog_g_dt: dlog_g_dt(t, eta, p),
        dlog_b_dt: dlog_b_multiplier_dt(t, k, eta, p),
        modulus: n,
        s_exponent: p.s,
    }
}

/// log A(t, k, eta) with lambda evaluated internally.
pub fn a_log(t: f64, k: i64, eta: f64, p: &WeightParams) -> f64 {
    mode_weight(t, k, eta, lambda_of_t(t, p), p).log_a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::lambda::lambda_dot;

    fn p() -> WeightParams {
        WeightParams::defaults()
    }

    #[test]
    fn value_at_zero_mode_is_four() {
        // n = 0: Gevrey and Sobolev factors are 1, J = M = 2, B = 1.
        let la = a_log(0.0, 0, 0.0, &p());
        assert!((la - 4.0f64.ln()).abs() < 1e-14);
        let la = a_log(7.0, 0, 0.0, &p());
        assert!((la - 4.0f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn even_under_joint_sign_flip() {
        let p = p();
        for &(t, k, eta) in &[
            (0.0, 1, 10.0),
            (8.0, 1, 10.0),
            (30.0, 2, 24.0),
            (12.0, -3, 7.5),
            (5.0, 2, -9.0),
        ] {
            let plus = a_log(t, k, eta, &p);
            let minus = a_log(t, -k, -eta, &p);
            assert!(
                (plus - minus).abs() < 1e-12 * plus.abs().max(1.0),
                "({t}, {k}, {eta})"
            );
        }
    }

    #[test]
    fn dominated_from_below_by_gevrey_factor() {
        let p = p();
        for &(t, k, eta) in &[(0.0f64, 3i64, 11.0f64), (9.0, 1, 4.0), (100.0, 5, -60.0)] {
            let n = (k as f64).abs() + eta.abs();
            let lam = crate::weights::lambda::lambda_of_t(t, &p);
            assert!(a_log(t, k, eta, &p) >= lam * n.powf(p.s));
        }
    }

    #[test]
    fn j_log_combines_frozen_theta() {
        // at (t, k, eta) = (0, 1, 10): log Theta = -2.21600152382
        let p = p();
        let term_eta = p.mu * 10.0f64.powf(1.0 / 3.0) + 2.21600152382;
        let term_k = p.mu;
        let want = log_sum_exp(term_eta, term_k);
        assert!((j_log(0.0, 1, 10.0, &p) - want).abs() < 1e-9);
    }

    #[test]
    fn m_log_combines_frozen_g() {
        // at (t, eta) = (15, 10): log g = -0.977269073587
        let p = p();
        let c = 4.0 * std::f64::consts::PI / p.delta_l;
        let term_eta = c * 10.0f64.powf(1.0 / 3.0) + 0.977269073587;
        let want = log_sum_exp(term_eta, c);
        assert!((m_log(15.0, 4, 10.0, &p) - want).abs() < 1e-8);
    }

    #[test]
    fn full_assembly_spot_check() {
        // (t, k, eta) = (30, 2, 24): B contributes its pinned log, and the
        // remaining factors recombine from their own modules.
        let p = p();
        let lam = crate::weights::lambda::lambda_of_t(30.0, &p);
        let n: f64 = 26.0;
        let want = lam * n.powf(p.s)
            + p.sigma * 0.5 * (1.0 + n * n).ln()
            + j_log(30.0, 2, 24.0, &p)
            + m_log(30.0, 2, 24.0, &p)
            + 21.6694616184;
        let got = a_log(30.0, 2, 24.0, &p);
        assert!((got - want).abs() < 1e-7 * want.abs(), "{got} vs {want}");
    }

    #[test]
    fn rate_matches_finite_difference() {
        let p = p();
        for &(t, k, eta) in &[(8.0, 1, 10.0), (30.0, 2, 24.0)] {
            let h = 1e-6 * t;
            let fd = (a_log(t + h, k, eta, &p) - a_log(t - h, k, eta, &p)) / (2.0 * h);
            let lam = crate::weights::lambda::lambda_of_t(t, &p);
            let an = mode_weight(t, k, eta, lam, &p).d_log_a_dt(lambda_dot(t, &p));
            assert!(
                (fd - an).abs() < 1e-4 * an.abs().max(1.0),
                "({t}, {k}, {eta}): fd {fd} vs {an}"
            );
        }
    }

    #[test]
    fn fractions_are_proper() {
        let p = p();
        let lam = crate::weights::lambda::lambda_of_t(8.0, &p);
        let w = mode_weight(8.0, 1, 10.0, lam, &p);
        assert!(w.frac_theta > 0.0 && w.frac_theta <= 1.0);
        assert!(w.frac_g > 0.0 && w.frac_g <= 1.0);
        // for eta = 10 >> k = 1 the eta-terms dominate both sums
        assert!(w.frac_theta > 0.99);
        assert!(w.frac_g > 0.99);
    }
}
