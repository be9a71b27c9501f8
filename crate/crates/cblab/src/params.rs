//! Validated parameter record shared by every multiplier component.

use thiserror::Error;

use crate::numerics::quad::adaptive_quad;

/// All multiplier constants in one validated record.
///
/// `mu` is tied to `c_theta` and `kappa` (`mu = 6(1 + 2 c_theta kappa)`), and
/// `delta_lambda` is calibrated from the radius pair unless set explicitly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightParams {
    /// Gevrey exponent, in (1/3, 1].
    pub s: f64,
    /// Initial Gevrey radius.
    pub lambda0: f64,
    /// Final Gevrey radius, below `lambda0`.
    pub lambda_prime: f64,
    /// Sobolev correction exponent in the main weight.
    pub sigma: f64,
    /// Sobolev exponent for the low-frequency energies.
    pub beta: f64,
    /// Toy-model coupling strength.
    pub kappa: f64,
    /// Constant multiplying `kappa` in the Theta exponents.
    pub c_theta: f64,
    /// Coefficient of the cube-root frequency factors; tied to `c_theta*kappa`.
    pub mu: f64,
    /// Smallness parameter of the g-weight, in (0, 1].
    pub delta_l: f64,
    /// Smallness parameter of the bounded ghost weight, in (0, 1].
    pub delta_b: f64,
    /// Decay exponent of the shrinking radius lambda(t).
    pub q_tilde: f64,
    /// Decay coefficient of lambda(t); calibrated by default.
    pub delta_lambda: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("s must satisfy 1/3 < s <= 1, got {0}")]
    BadS(f64),
    #[error("radii must satisfy lambda0 > lambda_prime > 0, got ({0}, {1})")]
    BadRadii(f64, f64),
    #[error("{name} must lie in (0, 1], got {value}")]
    BadSmallness { name: &'static str, value: f64 },
    #[error("mu must equal 6(1 + 2 c_theta kappa) = {expected}, got {got}")]
    BadMu { expected: f64, got: f64 },
    #[error("q_tilde must satisfy 1/2 < q_tilde, 2 q_tilde < 3s, 4 q_tilde < 3s+1, got {0}")]
    BadQTilde(f64),
    #[error("delta_lambda must lie in (0, lambda0 - lambda_prime], got {0}")]
    BadDeltaLambda(f64),
    #[error("{name} must be positive, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("{name} must be finite")]
    NotFinite { name: &'static str },
}

impl WeightParams {
    /// Expected `mu` for the stored `c_theta` and `kappa`.
    pub fn mu_expected(&self) -> f64 {
        6.0 * (1.0 + 2.0 * self.c_theta * self.kappa)
    }

    /// Product `c_theta * kappa` appearing in every Theta exponent.
    pub fn ck(&self) -> f64 {
        self.c_theta * self.kappa
    }

    /// The radius at t <= 1: (3 lambda0 + lambda_prime) / 4.
    pub fn lambda_at_one(&self) -> f64 {
        0.75 * self.lambda0 + 0.25 * self.lambda_prime
    }

    /// The calibration target for the limiting radius:
    /// midpoint plus an eighth of the gap, strictly above the midpoint.
    pub fn lambda_limit_target(&self) -> f64 {
        0.5 * (self.lambda0 + self.lambda_prime) + 0.125 * (self.lambda0 - self.lambda_prime)
    }

    /// Solves for the decay coefficient so the limiting radius hits
    /// `lambda_limit_target` exactly: the decay law is
    /// `1 + lambda(t) = (1 + lambda(1)) exp(-delta_lambda I(t))` with
    /// `I(t) = integral_1^t (1+tau^2)^{-q_tilde} dtau`, so
    /// `delta_lambda = log((1+lambda(1))/(1+target)) / I(infinity)`.
    pub fn calibrate_delta_lambda(lambda0: f64, lambda_prime: f64, q_tilde: f64) -> f64 {
        let lam1 = 0.75 * lambda0 + 0.25 * lambda_prime;
        let target = 0.5 * (lambda0 + lambda_prime) + 0.125 * (lambda0 - lambda_prime);
        let i_inf = radius_decay_integral_to_infinity(q_tilde);
        ((1.0 + lam1) / (1.0 + target)).ln() / i_inf
    }

    /// Default record: Gevrey exponent 0.8 with radii (1, 0.5), the small
    /// couplings (kappa, c_theta, delta_l, delta_b) = (0.01, 1, 0.1, 0.1),
    /// q_tilde = 3s/4, and the calibrated radius-decay coefficient.
    pub fn defaults() -> Self {
        Self::with_radii(0.8, 1.0, 0.5)
    }

    /// Defaults with a caller-chosen Gevrey exponent and radius pair.
    pub fn with_radii(s: f64, lambda0: f64, lambda_prime: f64) -> Self {
        let kappa = 0.01;
        let c_theta = 1.0;
        let q_tilde = 0.75 * s;
        WeightParams {
            s,
            lambda0,
            lambda_prime,
            sigma: 8.0,
            beta: 4.0,
            kappa,
            c_theta,
            mu: 6.0 * (1.0 + 2.0 * c_theta * kappa),
            delta_l: 0.1,
            delta_b: 0.1,
            q_tilde,
            delta_lambda: Self::calibrate_delta_lambda(lambda0, lambda_prime, q_tilde),
        }
    }

    /// Checks every structural invariant; call before any computation.
    pub fn validate(&self) -> Result<(), ParamError> {
        for (name, value) in [
            ("s", self.s),
            ("lambda0", self.lambda0),
            ("lambda_prime", self.lambda_prime),
            ("sigma", self.sigma),
            ("beta", self.beta),
            ("kappa", self.kappa),
            ("c_theta", self.c_theta),
            ("mu", self.mu),
            ("delta_l", self.delta_l),
            ("delta_b", self.delta_b),
            ("q_tilde", self.q_tilde),
            ("delta_lambda", self.delta_lambda),
        ] {
            if !value.is_finite() {
                return Err(ParamError::NotFinite { name });
            }
        }
        if !(self.s > 1.0 / 3.0 && self.s <= 1.0) {
            return Err(ParamError::BadS(self.s));
        }
        if !(self.lambda0 > self.lambda_prime && self.lambda_prime > 0.0) {
            return Err(ParamError::BadRadii(self.lambda0, self.lambda_prime));
        }
        for (name, value) in [("delta_l", self.delta_l), ("delta_b", self.delta_b)] {
            if !(value > 0.0 && value <= 1.0) {
                return Err(ParamError::BadSmallness { name, value });
            }
        }
        for (name, value) in [("kappa", self.kappa), ("c_theta", self.c_theta)] {
            if value <= 0.0 {
                return Err(ParamError::NotPositive { name, value });
            }
        }
        let expected = self.mu_expected();
        if (self.mu - expected).abs() > 1e-12 * expected {
            return Err(ParamError::BadMu {
                expected,
                got: self.mu,
            });
        }
        // 1/2 < q_tilde keeps the calibration integral finite; the two upper
        // bounds are the stated exponent constraints.
        if !(self.q_tilde > 0.5
            && 2.0 * self.q_tilde < 3.0 * self.s
            && 4.0 * self.q_tilde < 3.0 * self.s + 1.0)
        {
            return Err(ParamError::BadQTilde(self.q_tilde));
        }
        // The calibrated value is far below the gap; anything in (0, gap]
        // keeps the limiting radius above the midpoint of the radii.
        if !(self.delta_lambda > 0.0 && self.delta_lambda <= self.lambda0 - self.lambda_prime) {
            return Err(ParamError::BadDeltaLambda(self.delta_lambda));
        }
        Ok(())
    }
}

/// `integral_1^infinity (1 + tau^2)^{-q_tilde} dtau`, via the substitution
/// `tau = 1/u` onto the unit interval. Finite for `q_tilde > 1/2`.
pub fn radius_decay_integral_to_infinity(q_tilde: f64) -> f64 {
    adaptive_quad(
        &|u: f64| {
            if u == 0.0 {
                return 0.0;
            }
            (1.0 + u.powi(-2)).powf(-q_tilde) * u.powi(-2)
        },
        0.0,
        1.0,
        1e-12,
        1e-12,
    )
    .value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let p = WeightParams::defaults();
        p.validate().expect("default params must validate");
        assert!((p.mu - 6.12).abs() < 1e-12, "mu = {}", p.mu);
        assert!((p.q_tilde - 0.6).abs() < 1e-12);
    }

    #[test]
    fn calibration_matches_oracle() {
        // Independent quadrature oracle: I_inf(0.6) = 4.80099857232 and the
        // calibrated coefficient for radii (1, 0.5) is 0.00706135425058.
        let i_inf = radius_decay_integral_to_infinity(0.6);
        assert!(
            (i_inf - 4.80099857232).abs() < 1e-9,
            "I_inf = {i_inf}, expected 4.80099857232"
        );
        let dl = WeightParams::calibrate_delta_lambda(1.0, 0.5, 0.6);
        assert!(
            (dl - 0.00706135425058).abs() < 1e-12,
            "delta_lambda = {dl}"
        );
    }

    #[test]
    fn mu_mismatch_rejected() {
        let mut p = WeightParams::defaults();
        p.mu = 6.0;
        assert!(matches!(p.validate(), Err(ParamError::BadMu { .. })));
    }

    #[test]
    fn bad_smallness_rejected() {
        let mut p = WeightParams::defaults();
        p.delta_l = 1.5;
        assert!(matches!(
            p.validate(),
            Err(ParamError::BadSmallness { name: "delta_l", .. })
        ));
        p = WeightParams::defaults();
        p.delta_b = 0.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn bad_radii_rejected() {
        let mut p = WeightParams::defaults();
        p.lambda_prime = 1.5;
        assert!(matches!(p.validate(), Err(ParamError::BadRadii(..))));
    }

    #[test]
    fn delta_lambda_band() {
        let mut p = WeightParams::defaults();
        p.delta_lambda = 0.75; // above the gap lambda0 - lambda_prime = 0.5
        assert!(matches!(p.validate(), Err(ParamError::BadDeltaLambda(..))));
    }
}
