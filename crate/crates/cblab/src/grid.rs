//! Discrete doubly periodic box and its frequency lattice.
//!
//! The nonlinear solver works on x ∈ [0, 2π) × y ∈ [0, 2π·ly). Wavenumbers
//! are integers k in x and fractions η = j/ly in y, so a taller box refines
//! the η lattice without shrinking its reach. Spectral arrays are indexed
//! (k row, η column), both axes in standard FFT order (non-negative
//! frequencies first, then negative ones).

use ndarray::Array2;
use num_complex::Complex64;
use thiserror::Error;

/// Smallest admissible resolution along either axis.
pub const MIN_RESOLUTION: usize = 8;

/// Validation failures for box construction.
#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("{axis} resolution {value} must be a power of two, at least 8")]
    NotPowerOfTwo { axis: &'static str, value: usize },
    #[error("box half-height ly = {0} must be at least 4")]
    BoxTooShort(f64),
    #[error("dealias fraction {0} must lie in (0, 1]")]
    BadDealiasFraction(f64),
}

/// Doubly periodic box with power-of-two resolution in each direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    /// Number of collocation points (and retained integer wavenumbers) in x.
    pub nx: usize,
    /// Number of collocation points in y.
    pub ny: usize,
    /// Height of the box divided by 2π: y spans [0, 2π·ly).
    pub ly: f64,
    /// Fraction of the Nyquist band kept by the dealias mask (default 2/3).
    pub dealias_fraction: f64,
}

fn power_of_two_at_least_min(n: usize) -> bool {
    n >= MIN_RESOLUTION && n.is_power_of_two()
}

impl Grid {
    /// Box with the default 2/3 dealias rule.
    pub fn new(nx: usize, ny: usize, ly: f64) -> Result<Self, GridError> {
        Self::with_dealias_fraction(nx, ny, ly, 2.0 / 3.0)
    }

    /// Box with an explicit dealias fraction in (0, 1].
    pub fn with_dealias_fraction(
        nx: usize,
        ny: usize,
        ly: f64,
        dealias_fraction: f64,
    ) -> Result<Self, GridError> {
        if !power_of_two_at_least_min(nx) {
            return Err(GridError::NotPowerOfTwo { axis: "x", value: nx });
        }
        if !power_of_two_at_least_min(ny) {
            return Err(GridError::NotPowerOfTwo { axis: "y", value: ny });
        }
        if !(ly >= 4.0) || !ly.is_finite() {
            return Err(GridError::BoxTooShort(ly));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(GridError::BadDealiasFraction(dealias_fraction));
        }
        Ok(Self { nx, ny, ly, dealias_fraction })
    }

    /// Signed integer x-wavenumber stored in row `i`.
    #[inline]
    pub fn k_at(&self, i: usize) -> i64 {
        debug_assert!(i < self.nx);
        if i < self.nx / 2 {
            i as i64
        } else {
            i as i64 - self.nx as i64
        }
    }

    /// Signed integer y-lattice index stored in column `j`.
    #[inline]
    pub fn j_at(&self, j: usize) -> i64 {
        debug_assert!(j < self.ny);
        if j < self.ny / 2 {
            j as i64
        } else {
            j as i64 - self.ny as i64
        }
    }

    /// y-frequency η = j/ly stored in column `j`.
    #[inline]
    pub fn eta_at(&self, j: usize) -> f64 {
        self.j_at(j) as f64 / self.ly
    }

    /// Sheared-frame y-frequency η − k·t seen from the lab frame at time `t`
    /// (the k = 0 column of modes is not advected, so η is returned as-is).
    #[inline]
    pub fn eta_shifted(&self, i: usize, j: usize, t: f64) -> f64 {
        let k = self.k_at(i);
        let eta = self.eta_at(j);
        if k == 0 {
            eta
        } else {
            eta - k as f64 * t
        }
    }

    /// Row index storing signed wavenumber `k`, if representable (Nyquist
    /// row excluded so every stored mode has a conjugate partner).
    pub fn row_of_k(&self, k: i64) -> Option<usize> {
        let half = self.nx as i64 / 2;
        if k.abs() >= half {
            return None;
        }
        Some(if k >= 0 { k as usize } else { (self.nx as i64 + k) as usize })
    }

    /// Column index storing signed lattice index `j`, if representable.
    pub fn col_of_j(&self, j: i64) -> Option<usize> {
        let half = self.ny as i64 / 2;
        if j.abs() >= half {
            return None;
        }
        Some(if j >= 0 { j as usize } else { (self.ny as i64 + j) as usize })
    }

    /// Largest |k| kept by the dealias mask.
    #[inline]
    pub fn kx_cut(&self) -> i64 {
        (self.nx as f64 * self.dealias_fraction / 2.0).floor() as i64
    }

    /// Largest |j| kept by the dealias mask.
    #[inline]
    pub fn jy_cut(&self) -> i64 {
        (self.ny as f64 * self.dealias_fraction / 2.0).floor() as i64
    }

    /// Whether the dealias mask keeps the mode stored at (row i, column j).
    #[inline]
    pub fn keeps(&self, i: usize, j: usize) -> bool {
        self.k_at(i).abs() <= self.kx_cut() && self.j_at(j).abs() <= self.jy_cut()
    }

    /// Zero every mode outside the dealias band (idempotent by construction).
    pub fn apply_dealias(&self, field: &mut Array2<Complex64>) {
        let zero = Complex64::new(0.0, 0.0);
        for ((i, j), value) in field.indexed_iter_mut() {
            if !self.keeps(i, j) {
                *value = zero;
            }
        }
    }

    /// Grid spacing in x.
    #[inline]
    pub fn dz(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.nx as f64
    }

    /// Grid spacing in y.
    #[inline]
    pub fn dv(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.ly / self.ny as f64
    }

    /// Collocation abscissae in x: z_i = i·2π/nx.
    pub fn z_coords(&self) -> Vec<f64> {
        (0..self.nx).map(|i| i as f64 * self.dz()).collect()
    }

    /// Collocation abscissae in y: v_j = j·dv, matching the transform's index
    /// origin so a stored coefficient is exactly the amplitude of
    /// e^{i(k·z + η·v)}.
    pub fn v_coords(&self) -> Vec<f64> {
        (0..self.ny).map(|j| j as f64 * self.dv()).collect()
    }

    /// Weight of one lattice node in frequency-side quadratures, making
    /// Σ |ĝ|²·weight a Riemann sum over the continuum η line.
    #[inline]
    pub fn lattice_weight(&self) -> f64 {
        1.0 / self.ly
    }

    /// Allocate a zero spectral field shaped for this box.
    pub fn zero_field(&self) -> Array2<Complex64> {
        Array2::zeros((self.nx, self.ny))
    }
}
