//! Pseudo-spectral integrator for two-dimensional Boussinesq perturbations
//! of a linear shear flow.
//!
//! Unknowns are the perturbation vorticity ω and density θ on a doubly
//! periodic box, stored as spectral coefficients in the sheared frame
//! z = x − t·y so the background advection is absorbed exactly into the
//! time-dependent frequency η̃(t) = η − k·t. One step is a Strang split:
//! an exact viscous half step (closed-form integrating factor; θ is never
//! diffused), a full RK4 step of the dealiased advection and buoyancy
//! coupling, and a mirror viscous half step. Nonlinear products are taken
//! pointwise on the lab grid after an exact phase shift, then brought back,
//! dealiased, and re-symmetrized, so conjugate symmetry and zero means hold
//! exactly at every checkpoint.

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fftops::{conjugate_asymmetry, enforce_conjugate_symmetry, FftOps};
use crate::grid::{Grid, GridError};
use crate::linear::symbol_integral;

/// Complex coefficients over the frequency lattice, indexed (k row, η column).
pub type SpectralField = Array2<Complex64>;

/// Which role the density plays in the dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    /// Density feeds back on vorticity through −γ²∂_xθ and is itself forced
    /// by the vertical velocity (stratified case, γ > 0).
    Buoyant,
    /// Density rides along as a passive scalar and vorticity obeys plain
    /// Navier–Stokes around the shear (γ = 0).
    Passive,
}

impl SystemKind {
    pub fn parse(text: &str) -> Option<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "buoyant" => Some(Self::Buoyant),
            "passive" => Some(Self::Passive),
            _ => None,
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Self::Buoyant => "buoyant",
            Self::Passive => "passive",
        }
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("parameter {name} = {value} is outside its admissible range")]
    BadParameter { name: &'static str, value: f64 },
    #[error("system '{system}' is incompatible with gamma = {gamma} (buoyant needs gamma > 0, passive needs gamma = 0)")]
    SystemGammaMismatch { system: &'static str, gamma: f64 },
    #[error("CFL violation at t = {t}: dt = {dt} exceeds the advective limit; use dt <= {suggested:.6e}")]
    CflViolation { t: f64, dt: f64, suggested: f64 },
    #[error("non-finite field values detected at t = {t}")]
    NonFinite { t: f64 },
}

/// Full description of one nonlinear run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Viscosity acting on vorticity only.
    pub nu: f64,
    /// Square root of the stratification-to-shear ratio.
    pub gamma: f64,
    /// Buoyant (two-way) or passive (one-way) density coupling.
    pub system: SystemKind,
    /// Amplitude of the initial perturbation in the Gevrey norm.
    pub epsilon: f64,
    /// Gevrey exponent of the initial envelope, in (1/3, 1].
    pub s_init: f64,
    /// Horizon time.
    pub t_end: f64,
    /// Upper bound on the time step (the advective limit may shrink it).
    pub dt: f64,
    /// Seed for the random initial phases.
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let checks: [(&'static str, f64, bool); 6] = [
            ("nu", self.nu, self.nu.is_finite() && self.nu >= 0.0),
            ("gamma", self.gamma, self.gamma.is_finite() && self.gamma >= 0.0),
            (
                "epsilon",
                self.epsilon,
                self.epsilon.is_finite() && self.epsilon >= 0.0,
            ),
            (
                "s_init",
                self.s_init,
                self.s_init > 1.0 / 3.0 && self.s_init <= 1.0,
            ),
            ("T", self.t_end, self.t_end.is_finite() && self.t_end >= 0.0),
            ("dt", self.dt, self.dt.is_finite() && self.dt > 0.0),
        ];
        for (name, value, ok) in checks {
            if !ok {
                return Err(SolverError::BadParameter { name, value });
            }
        }
        let compatible = match self.system {
            SystemKind::Buoyant => self.gamma > 0.0,
            SystemKind::Passive => self.gamma == 0.0,
        };
        if !compatible {
            return Err(SolverError::SystemGammaMismatch {
                system: self.system.id(),
                gamma: self.gamma,
            });
        }
        Ok(())
    }

    /// Stratified desk-scale baseline: ν = 1, γ = 1, ε = 1e−3, T = 50.
    pub fn buoyant_baseline() -> Self {
        Self {
            nu: 1.0,
            gamma: 1.0,
            system: SystemKind::Buoyant,
            epsilon: 1e-3,
            s_init: 1.0,
            t_end: 50.0,
            dt: 0.05,
            seed: 7,
        }
    }

    /// Unforced transport baseline: ν = 0, γ = 0, passive density.
    pub fn transport_baseline() -> Self {
        Self {
            nu: 0.0,
            gamma: 0.0,
            system: SystemKind::Passive,
            ..Self::buoyant_baseline()
        }
    }
}

/// Spectral state of one run at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub omega: SpectralField,
    pub theta: SpectralField,
}

/// Gevrey radius of the initial envelope exp(−λ₀·(|k|+|η|)^{s_init}).
pub const INIT_ENVELOPE_LAMBDA: f64 = 1.5;
/// Largest |k| carrying initial data.
pub const INIT_BAND_K: i64 = 21;
/// Largest |j| (η-lattice index) carrying initial data.
pub const INIT_BAND_J: i64 = 32;

/// The ℓ¹ frequency modulus |k| + |η| used in every Gevrey bracket.
#[inline]
pub fn frequency_modulus(k: i64, eta: f64) -> f64 {
    k.unsigned_abs() as f64 + eta.abs()
}

/// Band-limited random-phase initial data with Gevrey envelope, zero means,
/// exact conjugate symmetry, and total Gevrey mass ε².
///
/// The draw order runs over the fixed (k, j) band, never over array storage,
/// so two grids with the same seed, box height, and a dealias band covering
/// the data band produce bitwise-identical coefficients. The k = 0 vorticity
/// row carries an extra (η²/(1+η²))^{3/2} shaping so the induced shear-mean
/// velocity stays mild at small η.
pub fn init_perturbation(grid: &Grid, cfg: &SimConfig) -> Result<SimState, SolverError> {
    cfg.validate()?;
    let mut omega = grid.zero_field();
    let mut theta = grid.zero_field();
    if cfg.epsilon == 0.0 {
        return Ok(SimState { t: 0.0, omega, theta });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let draw_phase = |rng: &mut ChaCha8Rng| {
        let phi: f64 = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
        Complex64::new(phi.cos(), phi.sin())
    };

    // Visit the band in a fixed order; every draw happens whether or not the
    // mode is representable so the stream stays aligned across grids.
    let mut placements: Vec<(i64, i64, Complex64, Complex64)> = Vec::new();
    for k in 1..=INIT_BAND_K {
        for m in -INIT_BAND_J..=INIT_BAND_J {
            let zw = draw_phase(&mut rng);
            let zt = draw_phase(&mut rng);
            placements.push((k, m, zw, zt));
        }
    }
    for m in 1..=INIT_BAND_J {
        let zw = draw_phase(&mut rng);
        let zt = draw_phase(&mut rng);
        placements.push((0, m, zw, zt));
    }

    for (k, m, zw, zt) in placements {
        let (Some(i), Some(j)) = (grid.row_of_k(k), grid.col_of_j(m)) else {
            continue;
        };
        if !grid.keeps(i, j) {
            continue;
        }
        let eta = m as f64 / grid.ly;
        let envelope = (-INIT_ENVELOPE_LAMBDA
            * frequency_modulus(k, eta).powf(cfg.s_init))
        .exp();
        let shaping = if k == 0 {
            let r = eta * eta / (1.0 + eta * eta);
            r.powf(1.5)
        } else {
            1.0
        };
        let cw = zw * envelope * shaping;
        let ct = zt * envelope;
        let ic = grid.row_of_k(-k).expect("band stays off Nyquist");
        let jc = grid.col_of_j(-m).expect("band stays off Nyquist");
        omega[(i, j)] = cw;
        omega[(ic, jc)] = cw.conj();
        theta[(i, j)] = ct;
        theta[(ic, jc)] = ct.conj();
    }

    // Normalize the combined Gevrey mass to ε², summing in band order so the
    // scale is also grid-independent.
    let mut total = 0.0f64;
    for k in -INIT_BAND_K..=INIT_BAND_K {
        for m in -INIT_BAND_J..=INIT_BAND_J {
            let (Some(i), Some(j)) = (grid.row_of_k(k), grid.col_of_j(m)) else {
                continue;
            };
            if !grid.keeps(i, j) {
                continue;
            }
            let eta = m as f64 / grid.ly;
            let weight =
                (2.0 * INIT_ENVELOPE_LAMBDA * frequency_modulus(k, eta).powf(cfg.s_init)).exp();
            total += (omega[(i, j)].norm_sqr() + theta[(i, j)].norm_sqr()) * weight;
        }
    }
    total *= grid.lattice_weight();
    let scale = cfg.epsilon / total.sqrt();
    omega.mapv_inplace(|c| c * scale);
    theta.mapv_inplace(|c| c * scale);
    Ok(SimState { t: 0.0, omega, theta })
}

/// Stream function and velocity from vorticity at frame time `t`:
/// ψ̂ = −ω̂/(k² + η̃²) with the (0,0) mode pinned to zero, û = (−iη̃ψ̂, ikψ̂).
pub fn velocity_from_vorticity(
    grid: &Grid,
    omega: &SpectralField,
    t: f64,
) -> (SpectralField, SpectralField) {
    let mut ux = grid.zero_field();
    let mut uy = grid.zero_field();
    for ((idx, omega_hat), (ux_out, uy_out)) in omega
        .indexed_iter()
        .zip(ux.iter_mut().zip(uy.iter_mut()))
    {
        let (i, j) = idx;
        let k = grid.k_at(i);
        if k == 0 && grid.j_at(j) == 0 {
            continue;
        }
        let eta_sh = grid.eta_shifted(i, j, t);
        let psi = -omega_hat / (k as f64 * k as f64 + eta_sh * eta_sh);
        *ux_out = Complex64::new(0.0, -eta_sh) * psi;
        *uy_out = Complex64::new(0.0, k as f64) * psi;
    }
    (ux, uy)
}

/// Largest modulus of the spectral divergence ik·ûˣ + iη̃·ûʸ.
pub fn max_divergence(grid: &Grid, ux: &SpectralField, uy: &SpectralField, t: f64) -> f64 {
    let mut worst = 0.0f64;
    for ((i, j), ux_hat) in ux.indexed_iter() {
        let k = grid.k_at(i) as f64;
        let eta_sh = grid.eta_shifted(i, j, t);
        let div = Complex64::new(0.0, k) * ux_hat + Complex64::new(0.0, eta_sh) * uy[(i, j)];
        worst = worst.max(div.norm());
    }
    worst
}

/// Lattice-weighted ℓ² norm √(Σ |ĝ|² / ly).
pub fn l2_norm(grid: &Grid, field: &SpectralField) -> f64 {
    let sum: f64 = field.iter().map(|c| c.norm_sqr()).sum();
    (sum * grid.lattice_weight()).sqrt()
}

/// Same norm restricted to the k ≠ 0 modes.
pub fn l2_norm_nonzero(grid: &Grid, field: &SpectralField) -> f64 {
    let mut sum = 0.0f64;
    for (i, row) in field.outer_iter().enumerate() {
        if grid.k_at(i) == 0 {
            continue;
        }
        sum += row.iter().map(|c| c.norm_sqr()).sum::<f64>();
    }
    (sum * grid.lattice_weight()).sqrt()
}

/// Exact viscous factor exp(−ν ∫_{t0}^{t1} (k² + (η − k s)²) ds) applied to
/// the vorticity; the density never diffuses.
fn apply_viscous(grid: &Grid, omega: &mut SpectralField, nu: f64, t0: f64, t1: f64) {
    if nu == 0.0 || t0 == t1 {
        return;
    }
    for ((i, j), value) in omega.indexed_iter_mut() {
        let k = grid.k_at(i);
        let eta = grid.eta_at(j);
        *value *= (-nu * symbol_integral(k, eta, t0, t1)).exp();
    }
}

/// One advection + coupling right-hand side evaluation at frame time `tau`.
fn stage_rhs(
    grid: &Grid,
    ops: &FftOps,
    cfg: &SimConfig,
    omega: &SpectralField,
    theta: &SpectralField,
    tau: f64,
) -> (SpectralField, SpectralField) {
    let (ux_hat, uy_hat) = velocity_from_vorticity(grid, omega, tau);

    let deriv_x = |field: &SpectralField| -> SpectralField {
        let mut out = field.clone();
        for ((i, _), value) in out.indexed_iter_mut() {
            *value *= Complex64::new(0.0, grid.k_at(i) as f64);
        }
        out
    };
    let deriv_y = |field: &SpectralField| -> SpectralField {
        let mut out = field.clone();
        for ((i, j), value) in out.indexed_iter_mut() {
            *value *= Complex64::new(0.0, grid.eta_shifted(i, j, tau));
        }
        out
    };

    let dx_omega_hat = deriv_x(omega);
    let dx_theta_hat = deriv_x(theta);

    let ux = ops.shear_to_lab_values(grid, &ux_hat, tau);
    let uy = ops.shear_to_lab_values(grid, &uy_hat, tau);
    let dxw = ops.shear_to_lab_values(grid, &dx_omega_hat, tau);
    let dyw = ops.shear_to_lab_values(grid, &deriv_y(omega), tau);
    let dxt = ops.shear_to_lab_values(grid, &dx_theta_hat, tau);
    let dyt = ops.shear_to_lab_values(grid, &deriv_y(theta), tau);

    let clean = |values: Array2<f64>| -> SpectralField {
        let mut spec = ops.lab_values_to_shear(grid, &values, tau);
        grid.apply_dealias(&mut spec);
        enforce_conjugate_symmetry(grid, &mut spec);
        spec[(0, 0)] = Complex64::new(0.0, 0.0);
        spec
    };
    let advect_omega = clean(&ux * &dxw + &uy * &dyw);
    let advect_theta = clean(&ux * &dxt + &uy * &dyt);

    let gamma_sq = cfg.gamma * cfg.gamma;
    let mut d_omega = -advect_omega;
    if gamma_sq > 0.0 {
        d_omega -= &(&dx_theta_hat * gamma_sq);
    }
    let mut d_theta = -advect_theta;
    if cfg.system == SystemKind::Buoyant {
        d_theta += &uy_hat;
    }
    (d_omega, d_theta)
}

/// Advective rate max|uˣ − t·uʸ|/Δz + max|uʸ|/Δv whose product with dt is
/// capped at 1/2.
pub fn advective_rate(grid: &Grid, ops: &FftOps, state: &SimState) -> f64 {
    let (ux_hat, uy_hat) = velocity_from_vorticity(grid, &state.omega, state.t);
    let ux = ops.shear_to_lab_values(grid, &ux_hat, state.t);
    let uy = ops.shear_to_lab_values(grid, &uy_hat, state.t);
    let mut mz = 0.0f64;
    let mut mv = 0.0f64;
    for (a, b) in ux.iter().zip(uy.iter()) {
        mz = mz.max((a - state.t * b).abs());
        mv = mv.max(b.abs());
    }
    mz / grid.dz() + mv / grid.dv()
}

/// Advance one Strang-split step of size `dt`.
pub fn step(
    grid: &Grid,
    ops: &FftOps,
    cfg: &SimConfig,
    state: &mut SimState,
    dt: f64,
) -> Result<(), SolverError> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(SolverError::BadParameter { name: "dt", value: dt });
    }
    let t = state.t;
    let rate = advective_rate(grid, ops, state);
    if dt * rate > 0.5 {
        return Err(SolverError::CflViolation { t, dt, suggested: 0.5 / rate });
    }

    apply_viscous(grid, &mut state.omega, cfg.nu, t, t + 0.5 * dt);

    let (k1w, k1t) = stage_rhs(grid, ops, cfg, &state.omega, &state.theta, t);
    let half = 0.5 * dt;
    let w2 = &state.omega + &(&k1w * half);
    let t2 = &state.theta + &(&k1t * half);
    let (k2w, k2t) = stage_rhs(grid, ops, cfg, &w2, &t2, t + half);
    let w3 = &state.omega + &(&k2w * half);
    let t3 = &state.theta + &(&k2t * half);
    let (k3w, k3t) = stage_rhs(grid, ops, cfg, &w3, &t3, t + half);
    let w4 = &state.omega + &(&k3w * dt);
    let t4 = &state.theta + &(&k3t * dt);
    let (k4w, k4t) = stage_rhs(grid, ops, cfg, &w4, &t4, t + dt);

    let sixth = dt / 6.0;
    state.omega += &(&(&(&k1w + &k4w) + &(&(&k2w + &k3w) * 2.0)) * sixth);
    state.theta += &(&(&(&k1t + &k4t) + &(&(&k2t + &k3t) * 2.0)) * sixth);

    apply_viscous(grid, &mut state.omega, cfg.nu, t + 0.5 * dt, t + dt);
    state.t = t + dt;

    let finite = state
        .omega
        .iter()
        .chain(state.theta.iter())
        .all(|c| c.re.is_finite() && c.im.is_finite());
    if !finite {
        return Err(SolverError::NonFinite { t: state.t });
    }
    Ok(())
}

/// Scalar health and norm summary recorded at every checkpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub omega_l2: f64,
    pub theta_l2: f64,
    pub omega_nonzero_l2: f64,
    pub theta_nonzero_l2: f64,
    pub ux_nonzero_l2: f64,
    pub uy_l2: f64,
    /// Largest conjugate-symmetry gap (exactly zero for a healthy state).
    pub conj_asymmetry: f64,
    /// Largest spectral divergence over the combined velocity norm.
    pub divergence_rel: f64,
    /// |ω̂(0,0)| + |θ̂(0,0)|, preserved at exactly zero.
    pub mean_abs: f64,
}

/// Measure the checkpoint record for a state.
pub fn measure_record(grid: &Grid, state: &SimState) -> StepRecord {
    let (ux, uy) = velocity_from_vorticity(grid, &state.omega, state.t);
    let ux_norm = l2_norm(grid, &ux);
    let uy_norm = l2_norm(grid, &uy);
    let u_norm = ux_norm.hypot(uy_norm);
    let div = max_divergence(grid, &ux, &uy, state.t);
    StepRecord {
        t: state.t,
        omega_l2: l2_norm(grid, &state.omega),
        theta_l2: l2_norm(grid, &state.theta),
        omega_nonzero_l2: l2_norm_nonzero(grid, &state.omega),
        theta_nonzero_l2: l2_norm_nonzero(grid, &state.theta),
        ux_nonzero_l2: l2_norm_nonzero(grid, &ux),
        uy_l2: l2_norm(grid, &uy),
        conj_asymmetry: conjugate_asymmetry(grid, &state.omega)
            .max(conjugate_asymmetry(grid, &state.theta)),
        divergence_rel: if u_norm > 0.0 { div / u_norm } else { 0.0 },
        mean_abs: state.omega[(0, 0)].norm() + state.theta[(0, 0)].norm(),
    }
}

/// Number of snapshot intervals a run is divided into.
pub const SNAPSHOTS_PER_RUN: usize = 50;

/// Everything a run produces: checkpoint states and scalar records.
#[derive(Debug, Clone)]
pub struct SimOutput {
    pub snapshots: Vec<SimState>,
    pub records: Vec<StepRecord>,
}

/// Integrate from random initial data to the horizon, checkpointing at the
/// 50 evenly spaced snapshot times (a zero horizon gives one snapshot).
/// Deterministic: the same grid, config, and seed give identical output.
pub fn run(grid: &Grid, cfg: &SimConfig) -> Result<SimOutput, SolverError> {
    cfg.validate()?;
    let ops = FftOps::new(grid);
    let mut state = init_perturbation(grid, cfg)?;
    let mut output = SimOutput {
        snapshots: vec![state.clone()],
        records: vec![measure_record(grid, &state)],
    };
    if cfg.t_end == 0.0 {
        return Ok(output);
    }
    for stage in 1..=SNAPSHOTS_PER_RUN {
        let target = cfg.t_end * stage as f64 / SNAPSHOTS_PER_RUN as f64;
        while state.t < target - 1e-12 * cfg.t_end {
            let rate = advective_rate(grid, &ops, &state);
            let cfl_dt = if rate > 0.0 { 0.5 / rate } else { f64::INFINITY };
            let dt = cfg.dt.min(0.5 * cfl_dt).min(target - state.t);
            step(grid, &ops, cfg, &mut state, dt)?;
        }
        state.t = target;
        output.snapshots.push(state.clone());
        output.records.push(measure_record(grid, &state));
    }
    Ok(output)
}
