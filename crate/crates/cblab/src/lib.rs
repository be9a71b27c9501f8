//! Pseudo-spectral laboratory for buoyant perturbations of a linear shear flow.
//!
//! The crate has five functional areas:
//!
//! * [`weights`] — critical resonance intervals and the time-dependent Fourier
//!   multipliers `Theta`, `g`, `B`, `lambda(t)`, and their assembly into the
//!   full weight `A`, plus numerical verifiers for the growth and ratio
//!   properties the construction is designed to have.
//! * [`linear`] — exact and numerically integrated per-mode solutions of the
//!   linearized system in the moving frame, the damped "good unknown" `K`,
//!   and decay-rate scans.
//! * [`toy`] — the two-component resonant/non-resonant toy ODE and the
//!   truncated discrete frequency chain.
//! * [`solver`] — dealiased pseudo-spectral time integration of the full
//!   nonlinear perturbation system in sheared coordinates.
//! * [`diag`] — weighted energies, dissipation-like CK terms, the coordinate
//!   transform quantities, the scattering residual, and decay-rate fits.
//!
//! All multiplier evaluation happens in log space: the weights span hundreds
//! of orders of magnitude at realistic parameters and their raw values do not
//! fit in an `f64`.

pub mod config;
pub mod diag;
pub mod fftops;
pub mod grid;
pub mod linear;
pub mod numerics;
pub mod params;
pub mod report;
pub mod snapshot;
pub mod solver;
pub mod toy;
pub mod weights;

pub use params::WeightParams;
