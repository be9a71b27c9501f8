//! Numerical verification scans for the weight family: the frequency-growth
//! band of 1/Theta, the arctan closed form of g against direct ODE
//! integration, and sampled ratio/commutator bounds with fitted smallest
//! constants.

use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::assembled::{j_log, m_log};
use super::gweight::{dlog_g_dt, log_g, log_one_over_g_zero};
use super::intervals::integer_part;
use super::theta::log_theta_nr;
use crate::numerics::ode::{integrate, OdeOptions};
use crate::params::WeightParams;

// ------------------------------------------------------------------------
// frequency-growth band of 1/Theta
// ------------------------------------------------------------------------

/// One row of the growth scan.
#[derive(Debug, Clone, Copy)]
pub struct GrowthRow {
    pub eta: f64,
    /// log of 1/Theta(0, eta)
    pub log_inv_theta: f64,
    /// measured value divided by the designed envelope
    /// eta^{-mu/12} e^{mu eta^{1/3} / 2}
    pub ratio: f64,
    /// log mismatch of the factorial-product growth against its
    /// Stirling reduction e^{3 eta^{1/3}} / ((2 pi)^{3/2} sqrt(eta)),
    /// reported for eta >= 100
    pub stirling_log_gap: Option<f64>,
}

/// Result of the growth scan over a list of frequencies.
#[derive(Debug, Clone)]
pub struct GrowthCheck {
    pub rows: Vec<GrowthRow>,
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// acceptance band for the ratio
    pub band: (f64, f64),
    /// largest ratio between successive rows (ordered as given)
    pub max_successive_drift: f64,
    pub pass: bool,
}

/// log(eta^N / (N!)^3) at N = E(eta^{1/3}).
fn log_factorial_product(eta: f64) -> f64 {
    let n = integer_part(eta.powf(1.0 / 3.0)).expect("eta > 1") as usize;
    let mut log_fact = 0.0;
    for j in 1..=n {
        log_fact += (j as f64).ln();
    }
    n as f64 * eta.ln() - 3.0 * log_fact
}

/// Scans r(eta) = [1/Theta(0,eta)] * eta^{mu/12} e^{-mu eta^{1/3}/2} over the
/// given frequencies (all > 1) and checks it stays inside `band` with bounded
/// drift between successive entries; also cross-checks the factorial product
/// against its Stirling reduction (within factor 10) for eta >= 100.
pub fn verify_growth_lemma(etas: &[f64], band: (f64, f64), p: &WeightParams) -> GrowthCheck {
    let ck = p.ck();
    let mut rows = Vec::with_capacity(etas.len());
    for &eta in etas {
        assert!(eta > 1.0, "growth scan needs eta > 1, got {eta}");
        let log_inv_theta = -log_theta_nr(0.0, eta, ck);
        let designed = 0.5 * p.mu * eta.powf(1.0 / 3.0) - p.mu / 12.0 * eta.ln();
        let ratio = (log_inv_theta - designed).exp();
        let stirling_log_gap = if eta >= 100.0 {
            let product = log_factorial_product(eta);
            let reduced = 3.0 * eta.powf(1.0 / 3.0)
                - 0.5 * eta.ln()
                - 1.5 * (2.0 * std::f64::consts::PI).ln();
            Some(product - reduced)
        } else {
            None
        };
        rows.push(GrowthRow {
            eta,
            log_inv_theta,
            ratio,
            stirling_log_gap,
        });
    }
    let ratio_min = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let ratio_max = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let max_successive_drift = rows
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0].ratio, w[1].ratio);
            (a / b).max(b / a)
        })
        .fold(1.0, f64::max);
    let in_band = ratio_min >= band.0 && ratio_max <= band.1;
    let stirling_ok = rows
        .iter()
        .filter_map(|r| r.stirling_log_gap)
        .all(|gap| gap.abs() <= 10.0f64.ln());
    GrowthCheck {
        rows,
        ratio_min,
        ratio_max,
        band,
        max_successive_drift,
        pass: in_band && max_successive_drift < 2.0 && stirling_ok,
    }
}

// ------------------------------------------------------------------------
// g: ODE integration against the closed form, and the global bound
// ------------------------------------------------------------------------

/// One frequency's ODE-vs-closed-form comparison (in the log domain).
#[derive(Debug, Clone, Copy)]
pub struct GOdeRow {
    pub eta: f64,
    /// integral of the growth rate over the whole window
    pub ode_log: f64,
    /// closed-form log(1/g(0, eta))
    pub closed_log: f64,
    /// worst relative mismatch over all interval junction checkpoints
    pub rel_err: f64,
}

/// Result of the g closed-form verification.
#[derive(Debug, Clone)]
pub struct GClosedFormCheck {
    pub rows: Vec<GOdeRow>,
    pub worst_rel_err: f64,
    /// smallest slack of log(1/g) under 3 pi delta_l^{-1} |eta|^{1/3}
    pub bound_min_slack: f64,
    pub bound_samples: usize,
    pub bound_pass: bool,
}

/// Integrates the log-g growth-rate ODE interval by interval (the rate is
/// smooth inside each bar interval) and compares the accumulated value with
/// the arctan closed form at every junction.
pub fn verify_g_closed_form(
    etas: &[f64],
    bound_samples: usize,
    seed: u64,
    p: &WeightParams,
) -> GClosedFormCheck {
    let mut rows = Vec::with_capacity(etas.len());
    for &eta in etas {
        assert!(eta > 1.0, "g scan needs eta > 1, got {eta}");
        let m = integer_part(eta.powf(2.0 / 3.0)).expect("eta > 1") as usize;
        let closed_total = log_one_over_g_zero(eta, p);
        let base = log_g(0.0, eta, p); // = -closed_total
        let rhs = |t: f64, _y: &[f64], dy: &mut [f64]| {
            dy[0] = dlog_g_dt(t, eta, p);
        };
        let opts = OdeOptions {
            rtol: 1e-11,
            atol: 1e-14,
            h_initial: 1e-3,
            h_max: f64::INFINITY,
        };
        let mut y = [0.0f64];
        let mut t_lo = 2.0 * eta / (2.0 * m as f64 + 1.0);
        let mut rel_err = 0.0f64;
        for j in (1..=m).rev() {
            let t_hi = 2.0 * eta / (2.0 * j as f64 - 1.0);
            integrate(&rhs, t_lo, t_hi, &mut y, &opts)
                .expect("g-rate integration cannot collapse: bounded smooth rate");
            let closed_here = log_g(t_hi, eta, p) - base;
            rel_err = rel_err.max((y[0] - closed_here).abs() / closed_total);
            t_lo = t_hi;
        }
        rows.push(GOdeRow {
            eta,
            ode_log: y[0],
            closed_log: closed_total,
            rel_err,
        });
    }
    let worst_rel_err = rows.iter().map(|r| r.rel_err).fold(0.0, f64::max);

    // randomized global bound: 1 <= 1/g <= exp(3 pi delta_l^{-1} |eta|^{1/3})
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let log_eta = Uniform::new(0.0f64, 5.0);
    let mut bound_min_slack = f64::INFINITY;
    for _ in 0..bound_samples {
        let eta = 10.0f64.powf(log_eta.sample(&mut rng));
        let t = rng.gen_range(0.0..2.2 * eta);
        let log_inv = -log_g(t, eta, p);
        let cap = 3.0 * std::f64::consts::PI / p.delta_l * eta.powf(1.0 / 3.0);
        bound_min_slack = bound_min_slack.min(cap - log_inv).min(log_inv + 1e-12);
    }
    GClosedFormCheck {
        rows,
        worst_rel_err,
        bound_min_slack,
        bound_samples,
        bound_pass: bound_min_slack >= 0.0,
    }
}

// ------------------------------------------------------------------------
// sampled ratio / commutator bounds with fitted constants
// ------------------------------------------------------------------------

/// The five sampled bounds. Each relates two weight evaluations at separated
/// frequencies to an envelope C * w * exp(C * coef * d^{1/3}) (the
/// growth-ratio bound fixes the exponent coefficient to mu and fits only the
/// multiplicative constant).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioLemma {
    /// g(t,xi)/g(t,eta) + g(t,eta)/g(t,xi) against exp(C delta_l^{-1} d^{1/3})
    GRatio,
    /// Theta_NR(t,eta)/Theta_NR(t,xi) against a fixed exp(mu d^{1/3})
    ThetaRatio,
    /// |M_k(t,eta)/M_l(t,xi) - 1| with the 2/3-power frequency weight,
    /// for t below half the cube-root of both frequencies
    MCommutator,
    /// |M_k(t,eta)/M_k(t,xi) - 1| with the 1/3-power frequency weight,
    /// for t below half the 2/3-power of both frequencies
    MZeroCommutator,
    /// |J_k(t,eta)/J_l(t,xi) - 1| with the 2/3-power frequency weight and
    /// exponent coefficient mu, for t below half the 2/3-power of both
    JCommutator,
}

impl RatioLemma {
    pub const ALL: [RatioLemma; 5] = [
        RatioLemma::GRatio,
        RatioLemma::ThetaRatio,
        RatioLemma::MCommutator,
        RatioLemma::MZeroCommutator,
        RatioLemma::JCommutator,
    ];

    /// Stable identifier used in reports.
    pub fn id(&self) -> &'static str {
        match self {
            RatioLemma::GRatio => "g_ratio",
            RatioLemma::ThetaRatio => "theta_ratio",
            RatioLemma::MCommutator => "m_commutator",
            RatioLemma::MZeroCommutator => "m_zero_commutator",
            RatioLemma::JCommutator => "j_commutator",
        }
    }
}

/// The inputs of one sampled comparison (kept for worst-case reporting).
#[derive(Debug, Clone, Copy, Default)]
pub struct LemmaSample {
    pub t: f64,
    pub k: i64,
    pub eta: f64,
    pub l: i64,
    pub xi: f64,
}

/// One sample reduced to the three numbers the envelope fit needs:
/// lhs_log <= ln C + log_w + C * exp_coef * d^{1/3} must hold for all rows.
#[derive(Debug, Clone, Copy)]
struct FitRow {
    lhs_log: f64,
    log_w: f64,
    /// precomputed coef * d^{1/3} multiplying C in the exponent
    c_exponent: f64,
    inputs: LemmaSample,
}

/// Fitted smallest constant over one sample set.
#[derive(Debug, Clone, Copy)]
pub struct LemmaFit {
    pub lemma: RatioLemma,
    pub samples: usize,
    pub seed: u64,
    pub c_star: f64,
    pub worst: LemmaSample,
}

/// log |exp(delta) - 1| computed without leaving log space.
fn log_abs_expm1(delta: f64) -> f64 {
    if delta > 0.5 {
        // exp(delta) - 1 = exp(delta) (1 - exp(-delta))
        delta + (-(-delta).exp()).ln_1p()
    } else if delta < -0.5 {
        (-delta.exp()).ln_1p()
    } else {
        delta.exp_m1().abs().ln()
    }
}

fn sample_rows(
    lemma: RatioLemma,
    samples: usize,
    seed: u64,
    p: &WeightParams,
) -> Vec<FitRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let log_freq = Uniform::new(0.0f64, 4.0);
    let wavenumber = Uniform::new_inclusive(-30i64, 30);
    let mut rows = Vec::with_capacity(samples);
    while rows.len() < samples {
        let eta = 10.0f64.powf(log_freq.sample(&mut rng));
        // mixture: half nearby frequencies, half independent
        let xi = if rng.gen_bool(0.5) {
            (eta * 10.0f64.powf(rng.gen_range(-0.1..0.1))).clamp(1.0, 1e4)
        } else {
            10.0f64.powf(log_freq.sample(&mut rng))
        };
        let mut k = wavenumber.sample(&mut rng);
        let mut l = wavenumber.sample(&mut rng);
        if k == 0 {
            k = 1;
        }
        if l == 0 {
            l = -1;
        }
        let d_freq = (xi - eta).abs();
        let row = match lemma {
            RatioLemma::GRatio => {
                let t = rng.gen_range(0.0..2.2 * eta.max(xi));
                let delta = log_g(t, xi, p) - log_g(t, eta, p);
                // log(e^delta + e^-delta)
                let lhs_log = delta.abs() + (-2.0 * delta.abs()).exp().ln_1p();
                FitRow {
                    lhs_log,
                    log_w: 0.0,
                    c_exponent: d_freq.powf(1.0 / 3.0) / p.delta_l,
                    inputs: LemmaSample { t, k: 0, eta, l: 0, xi },
                }
            }
            RatioLemma::ThetaRatio => {
                let t = rng.gen_range(0.0..2.2 * eta.max(xi));
                let ck = p.ck();
                let lhs_log = (log_theta_nr(t, eta, ck) - log_theta_nr(t, xi, ck)).abs();
                FitRow {
                    lhs_log,
                    log_w: p.mu * d_freq.powf(1.0 / 3.0),
                    c_exponent: 0.0,
                    inputs: LemmaSample { t, k: 0, eta, l: 0, xi },
                }
            }
            RatioLemma::MCommutator => {
                let window = 0.5 * eta.min(xi).powf(1.0 / 3.0);
                let t = rng.gen_range(0.0..window);
                let delta = m_log(t, k, eta, p) - m_log(t, l, xi, p);
                let d_tot = (k - l).unsigned_abs() as f64 + d_freq;
                let denom = (k.unsigned_abs() + l.unsigned_abs()) as f64 + eta + xi;
                FitRow {
                    lhs_log: log_abs_expm1(delta),
                    log_w: 0.5 * (1.0 + d_tot * d_tot).ln() - 2.0 / 3.0 * denom.ln(),
                    c_exponent: d_tot.powf(1.0 / 3.0) / p.delta_l,
                    inputs: LemmaSample { t, k, eta, l, xi },
                }
            }
            RatioLemma::MZeroCommutator => {
                let window = 0.5 * eta.min(xi).powf(2.0 / 3.0);
                let t = rng.gen_range(0.0..window);
                let delta = m_log(t, k, eta, p) - m_log(t, k, xi, p);
                let denom = k.unsigned_abs() as f64 + eta + xi;
                FitRow {
                    lhs_log: log_abs_expm1(delta),
                    log_w: 0.5 * (1.0 + d_freq * d_freq).ln() - denom.ln() / 3.0,
                    c_exponent: d_freq.powf(1.0 / 3.0) / p.delta_l,
                    inputs: LemmaSample { t, k, eta, l: k, xi },
                }
            }
            RatioLemma::JCommutator => {
                let window = 0.5 * eta.min(xi).powf(2.0 / 3.0);
                let t = rng.gen_range(0.0..window);
                let delta = j_log(t, k, eta, p) - j_log(t, l, xi, p);
                let d_tot = (k - l).unsigned_abs() as f64 + d_freq;
                let denom = (k.unsigned_abs() + l.unsigned_abs()) as f64 + eta + xi;
                FitRow {
                    lhs_log: log_abs_expm1(delta),
                    log_w: 0.5 * (1.0 + d_tot * d_tot).ln() - 2.0 / 3.0 * denom.ln(),
                    c_exponent: p.mu * d_tot.powf(1.0 / 3.0),
                    inputs: LemmaSample { t, k, eta, l, xi },
                }
            }
        };
        rows.push(row);
    }
    rows
}

/// All rows satisfied at constant c?
fn envelope_holds(rows: &[FitRow], c: f64) -> bool {
    let log_c = c.ln();
    rows.iter()
        .all(|r| r.lhs_log <= log_c + r.log_w + c * r.c_exponent)
}

/// Fits the smallest constant for one bound over a seeded sample set by
/// bisection on the monotone envelope predicate.
pub fn fit_lemma_constant(
    lemma: RatioLemma,
    samples: usize,
    seed: u64,
    p: &WeightParams,
) -> LemmaFit {
    let rows = sample_rows(lemma, samples, seed, p);
    let mut hi = 1.0f64;
    while !envelope_holds(&rows, hi) && hi < 1e9 {
        hi *= 2.0;
    }
    assert!(
        envelope_holds(&rows, hi),
        "{}: no finite envelope constant below 1e9",
        lemma.id()
    );
    let mut lo = 1e-8f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if envelope_holds(&rows, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let c_star = hi;
    // the row with least slack at the fitted constant
    let worst = rows
        .iter()
        .min_by(|a, b| {
            let sa = c_star.ln() + a.log_w + c_star * a.c_exponent - a.lhs_log;
            let sb = c_star.ln() + b.log_w + c_star * b.c_exponent - b.lhs_log;
            sa.partial_cmp(&sb).expect("slacks are finite")
        })
        .map(|r| r.inputs)
        .unwrap_or_default();
    LemmaFit {
        lemma,
        samples,
        seed,
        c_star,
        worst,
    }
}

/// Two independent fits of the same bound and their relative gap.
#[derive(Debug, Clone, Copy)]
pub struct LemmaStability {
    pub first: LemmaFit,
    pub second: LemmaFit,
    pub rel_gap: f64,
}

/// Fits every bound twice (seeds `seed` and `seed + 1000`) and reports the
/// pairwise stability of the fitted constants.
pub fn verify_ratio_lemmas(samples: usize, seed: u64, p: &WeightParams) -> Vec<LemmaStability> {
    RatioLemma::ALL
        .iter()
        .map(|&lemma| {
            let first = fit_lemma_constant(lemma, samples, seed, p);
            let second = fit_lemma_constant(lemma, samples, seed + 1000, p);
            let rel_gap =
                (first.c_star - second.c_star).abs() / first.c_star.min(second.c_star);
            LemmaStability {
                first,
                second,
                rel_gap,
            }
        })
        .collect()
}

// ------------------------------------------------------------------------
// interval-coupling and junction property scans
// ------------------------------------------------------------------------

/// Measured bands for the two coupling ratios on the critical intervals of
/// modes with |k| >= 2 (where the interval sits inside its bar interval):
/// ratio1 = dTheta_R/dt / [(k^3/eta) Theta_NR] and
/// ratio2 = dTheta_NR/dt / [kappa_like Theta_R], with
/// kappa_like = ck * eta / (k^3 (1 + tau^2)).
#[derive(Debug, Clone, Copy)]
pub struct CouplingBands {
    pub ratio1: (f64, f64),
    pub ratio2: (f64, f64),
    pub rate_vs_inverse_time: (f64, f64),
    pub samples: usize,
}

/// Samples the coupling ratios over random in-interval points. Interval
/// membership keeps tau strictly interior so both one-sided rates agree.
pub fn check_interval_coupling(samples: usize, seed: u64, p: &WeightParams) -> CouplingBands {
    use super::intervals::critical_interval;
    use super::theta::{dlog_theta_nr_dt, theta_weight};
    let ck = p.ck();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r1 = (f64::INFINITY, 0.0f64);
    let mut r2 = (f64::INFINITY, 0.0f64);
    let mut r3 = (f64::INFINITY, 0.0f64);
    let mut n = 0usize;
    while n < samples {
        let k = rng.gen_range(2i64..=6);
        let kf = k as f64;
        // keep eta >= 2 k^3 so the interval parameters stay order one
        let eta = kf.powi(3) * 10.0f64.powf(rng.gen_range(0.31..1.7));
        let iv = critical_interval(k, eta)
            .expect("k > 0")
            .expect("eta k > 0 within cutoff");
        if !iv.contained_in_bar() {
            continue;
        }
        let t = rng.gen_range(iv.t_minus * 1.0001..iv.t_plus * 0.9999);
        let tau = t - eta / kf;
        let ev = theta_weight(t, k, eta, p);
        let theta_r = ev.value();
        let theta_nr = log_theta_nr(t, eta, ck).exp();
        let d_theta_r = ev.d_log_dt * theta_r;
        let d_theta_nr = dlog_theta_nr_dt(t, eta, ck) * theta_nr;
        let ratio1 = d_theta_r / ((kf.powi(3) / eta) * theta_nr);
        let ratio2 = d_theta_nr / (ck * eta / (kf.powi(3) * (1.0 + tau * tau)) * theta_r);
        let ratio3 = dlog_theta_nr_dt(t, eta, ck) * (1.0 + tau.abs());
        r1 = (r1.0.min(ratio1), r1.1.max(ratio1));
        r2 = (r2.0.min(ratio2), r2.1.max(ratio2));
        r3 = (r3.0.min(ratio3), r3.1.max(ratio3));
        n += 1;
    }
    CouplingBands {
        ratio1: r1,
        ratio2: r2,
        rate_vs_inverse_time: r3,
        samples,
    }
}

// ------------------------------------------------------------------------
// junction-continuity sweep of the assembled weight
// ------------------------------------------------------------------------

/// One continuity probe of log A at a structural junction time.
#[derive(Debug, Clone, Copy)]
pub struct JunctionProbe {
    pub k: i64,
    pub eta: f64,
    pub t: f64,
    /// Two-scale estimate of the value jump of log A at t: with
    /// d(δ) = |log A(t+δ) − log A(t−δ)|, the combination
    /// (32·d(δ/32) − d(δ))/31 cancels one-sided slopes (which may
    /// legitimately differ across a junction) and keeps a genuine
    /// discontinuity at full size.
    pub log_jump: f64,
}

/// Result of the junction-continuity sweep.
#[derive(Debug, Clone)]
pub struct JunctionSweep {
    /// The worst probe per (k, eta) pair, for reporting.
    pub worst_per_mode: Vec<JunctionProbe>,
    pub probes: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Probes the assembled weight for value continuity at every structural
/// time of each mode built from the given frequencies: window edge 2η,
/// freeze time, the bar boundaries 2η/(2j±1), and the flank times
/// η/j ∓ η/(2j³) together with the resonance η/j itself. The weight is
/// piecewise smooth with continuous values — only rates may jump — so the
/// two-sided log difference at distance δ must stay at the size of
/// δ × (bounded rate).
pub fn verify_junction_continuity(etas: &[f64], p: &WeightParams) -> JunctionSweep {
    use super::assembled::a_log;
    let tolerance = 1e-4;
    let mut worst_per_mode = Vec::new();
    let mut probes = 0usize;
    let mut worst = 0.0f64;
    for &eta in etas {
        if !(eta > 1.0) {
            continue;
        }
        let n = integer_part(eta.powf(1.0 / 3.0)).unwrap_or(0).max(1);
        let bar_count = integer_part(eta.powf(2.0 / 3.0)).unwrap_or(1).min(60);
        for k in 1..=3i64 {
            let mut times = vec![2.0 * eta, 2.0 * eta / (2.0 * n as f64 + 1.0)];
            for j in 1..=bar_count {
                let jf = j as f64;
                times.push(2.0 * eta / (2.0 * jf + 1.0));
                times.push(2.0 * eta / (2.0 * jf - 1.0));
            }
            for j in 1..=n {
                let jf = j as f64;
                let half = eta / (2.0 * jf.powi(3));
                times.push(eta / jf - half);
                times.push(eta / jf);
                times.push(eta / jf + half);
            }
            let mut probe = JunctionProbe {
                k,
                eta,
                t: 0.0,
                log_jump: 0.0,
            };
            for &t in &times {
                let delta = 1e-7 * t.max(1.0);
                if t <= delta {
                    continue;
                }
                let d = |h: f64| (a_log(t + h, k, eta, p) - a_log(t - h, k, eta, p)).abs();
                let jump = (32.0 * d(delta / 32.0) - d(delta)).max(0.0) / 31.0;
                probes += 1;
                if jump > probe.log_jump {
                    probe.log_jump = jump;
                    probe.t = t;
                }
            }
            worst = worst.max(probe.log_jump);
            worst_per_mode.push(probe);
        }
    }
    JunctionSweep {
        worst_per_mode,
        probes,
        worst,
        tolerance,
        pass: worst <= tolerance,
    }
}
