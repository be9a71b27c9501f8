//! Integer part and the critical (resonant) time intervals of a mode.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum WeightError {
    #[error("integer_part requires a nonnegative argument, got {0}")]
    NegativeArgument(f64),
    #[error("wavenumber k must be nonzero")]
    ZeroWavenumber,
}

/// Floor of a nonnegative real, as used in the frequency cutoffs
/// `E(|eta|^{1/3})` and `E(|eta|^{2/3})`.
pub fn integer_part(eta: f64) -> Result<i64, WeightError> {
    if eta < 0.0 || !eta.is_finite() {
        return Err(WeightError::NegativeArgument(eta));
    }
    Ok(eta.floor() as i64)
}

/// Resonant interval of mode (k, eta): times near eta/k where the mode is
/// amplified, together with the enclosing dyadic-in-k "bar" interval used by
/// the backward weight constructions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceInterval {
    pub k: i64,
    pub eta: f64,
    /// |eta/k| - |eta|/(2|k|^3)
    pub t_minus: f64,
    /// |eta/k| + |eta|/(2|k|^3)
    pub t_plus: f64,
    /// 2|eta|/(2|k|+1)
    pub bar_lo: f64,
    /// 2|eta|/(2|k|-1)
    pub bar_hi: f64,
}

impl ResonanceInterval {
    /// Whether `t` lies in the resonant window [t_minus, t_plus].
    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_minus && t <= self.t_plus
    }

    /// Whether [t_minus, t_plus] sits inside [bar_lo, bar_hi]. Fails for
    /// |k| = 1 at every eta (t_minus = |eta|/2 < 2|eta|/3); callers record
    /// violations rather than altering the construction.
    pub fn contained_in_bar(&self) -> bool {
        self.t_minus >= self.bar_lo && self.t_plus <= self.bar_hi
    }
}

/// Returns the resonant interval of (k, eta), or `None` when the mode has no
/// resonance: that requires eta*k >= 0 and 1 <= |k| <= E(|eta|^{1/3}).
pub fn critical_interval(k: i64, eta: f64) -> Result<Option<ResonanceInterval>, WeightError> {
    if k == 0 {
        return Err(WeightError::ZeroWavenumber);
    }
    if eta * (k as f64) < 0.0 {
        return Ok(None);
    }
    let ae = eta.abs();
    let ak = k.abs();
    if ak > integer_part(ae.powf(1.0 / 3.0))? {
        return Ok(None);
    }
    let akf = ak as f64;
    let center = ae / akf;
    let half = ae / (2.0 * akf.powi(3));
    Ok(Some(ResonanceInterval {
        k,
        eta,
        t_minus: center - half,
        t_plus: center + half,
        bar_lo: 2.0 * ae / (2.0 * akf + 1.0),
        bar_hi: 2.0 * ae / (2.0 * akf - 1.0),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_part_examples() {
        assert_eq!(integer_part(0.5).unwrap(), 0);
        assert_eq!(integer_part(8.0).unwrap(), 8);
        assert_eq!(integer_part(1000.3).unwrap(), 1000);
        assert!(integer_part(-1.0).is_err());
    }

    #[test]
    fn interval_k1_eta8() {
        let iv = critical_interval(1, 8.0).unwrap().unwrap();
        assert_eq!(iv.t_minus, 4.0);
        assert_eq!(iv.t_plus, 12.0);
        assert!((iv.bar_lo - 16.0 / 3.0).abs() < 1e-14);
        assert!((iv.bar_hi - 16.0).abs() < 1e-14);
        // known containment violation at k = 1: t_minus < bar_lo
        assert!(!iv.contained_in_bar());
    }

    #[test]
    fn interval_k2_eta8() {
        let iv = critical_interval(2, 8.0).unwrap().unwrap();
        assert!((iv.t_minus - 3.5).abs() < 1e-14);
        assert!((iv.t_plus - 4.5).abs() < 1e-14);
        assert!(iv.contained_in_bar());
    }

    #[test]
    fn empty_cases() {
        // opposite signs
        assert_eq!(critical_interval(1, -8.0).unwrap(), None);
        // |k| above the cube-root cutoff: E(8^(1/3)) = 2
        assert_eq!(critical_interval(3, 8.0).unwrap(), None);
        // k = 0 rejected
        assert!(critical_interval(0, 8.0).is_err());
    }

    #[test]
    fn negative_pair_mirrors_positive() {
        let pos = critical_interval(2, 30.0).unwrap().unwrap();
        let neg = critical_interval(-2, -30.0).unwrap().unwrap();
        assert_eq!(pos.t_minus, neg.t_minus);
        assert_eq!(pos.t_plus, neg.t_plus);
        assert_eq!(pos.bar_lo, neg.bar_lo);
    }

    #[test]
    fn containment_holds_for_k_at_least_2() {
        // 2k^2 - 2k - 1 > 0 for k >= 2 puts t_minus above bar_lo.
        for k in 2..=10i64 {
            for &eta in &[1000.0, 5000.0, 50000.0] {
                if let Some(iv) = critical_interval(k, eta).unwrap() {
                    assert!(
                        iv.contained_in_bar(),
                        "containment failed at k={k}, eta={eta}: {iv:?}"
                    );
                }
            }
        }
    }
}
