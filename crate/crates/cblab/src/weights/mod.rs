//! Critical resonance intervals and the time-dependent Fourier multipliers:
//! the resonance-growth weight `Theta`, the interval weight `g`, the bounded
//! ghost weight `B`, the shrinking Gevrey radius `lambda(t)`, and their
//! assembly into the full weight `A`, together with numerical verifiers for
//! the growth and ratio properties of the construction.

pub mod assembled;
pub mod bfactor;
pub mod cutoff;
pub mod gweight;
pub mod intervals;
pub mod lambda;
pub mod theta;
pub mod verify;

pub use assembled::{a_log, j_log, m_log, mode_weight, ModeWeight, WeightEvaluation, WeightRegime};
pub use bfactor::{b_multiplier_log, B_EXPONENT_CAP};
pub use cutoff::b_cutoff;
pub use gweight::g_weight;
pub use intervals::{critical_interval, integer_part, ResonanceInterval, WeightError};
pub use lambda::{lambda_dot, lambda_of_t};
pub use theta::theta_weight;
pub use verify::{
    check_interval_coupling, fit_lemma_constant, verify_g_closed_form, verify_growth_lemma,
    verify_ratio_lemmas, GClosedFormCheck, GrowthCheck, LemmaFit, LemmaStability, RatioLemma,
};
