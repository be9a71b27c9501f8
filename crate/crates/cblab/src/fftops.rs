//! FFT plumbing between spectral storage and grid values.
//!
//! Spectral arrays are indexed (k row, η column). The forward transform
//! carries the full 1/(nx·ny) normalization; the inverse is bare, so the two
//! compose to the identity. The solver stores fields in the sheared frame
//! z = x − t·y; helpers here also evaluate such a field on the lab grid and
//! come back, which amounts to a per-row phase e^{∓i·k·t·v} applied in the
//! mixed (k, v) representation between the two 1D transform passes.

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid;

/// Cached FFT plans for one grid shape.
pub struct FftOps {
    nx: usize,
    ny: usize,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
}

impl FftOps {
    pub fn new(grid: &Grid) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            nx: grid.nx,
            ny: grid.ny,
            fwd_x: planner.plan_fft_forward(grid.nx),
            inv_x: planner.plan_fft_inverse(grid.nx),
            fwd_y: planner.plan_fft_forward(grid.ny),
            inv_y: planner.plan_fft_inverse(grid.ny),
        }
    }

    /// 1D transforms along axis 1 (the η/v direction), one per row.
    fn transform_rows(&self, data: &mut Array2<Complex64>, fft: &Arc<dyn Fft<f64>>) {
        let ny = self.ny;
        let slice = data.as_slice_mut().expect("spectral arrays use standard layout");
        slice.par_chunks_mut(ny).for_each(|row| fft.process(row));
    }

    /// 1D transforms along axis 0 (the k/x direction), one per column.
    fn transform_cols(&self, data: &mut Array2<Complex64>, fft: &Arc<dyn Fft<f64>>) {
        let nx = self.nx;
        let mut flipped = Array2::zeros((self.ny, self.nx));
        flipped.assign(&data.t());
        {
            let slice = flipped.as_slice_mut().expect("owned array uses standard layout");
            slice.par_chunks_mut(nx).for_each(|col| fft.process(col));
        }
        data.assign(&flipped.t());
    }

    /// Grid values → spectral coefficients, normalized by 1/(nx·ny).
    pub fn forward2d(&self, data: &mut Array2<Complex64>) {
        self.transform_cols(data, &self.fwd_x);
        self.transform_rows(data, &self.fwd_y);
        let scale = 1.0 / (self.nx as f64 * self.ny as f64);
        data.mapv_inplace(|c| c * scale);
    }

    /// Spectral coefficients → grid values (unscaled inverse).
    pub fn inverse2d(&self, data: &mut Array2<Complex64>) {
        self.transform_rows(data, &self.inv_y);
        self.transform_cols(data, &self.inv_x);
    }

    /// Multiply the mixed (k row, v column) representation by e^{i·sign·k·t·v}.
    fn apply_shear_phase(&self, grid: &Grid, data: &mut Array2<Complex64>, t: f64, sign: f64) {
        let v = grid.v_coords();
        for (i, mut row) in data.outer_iter_mut().into_iter().enumerate() {
            let k = grid.k_at(i) as f64;
            if k == 0.0 {
                continue;
            }
            for (j, value) in row.iter_mut().enumerate() {
                let phase = sign * k * t * v[j];
                *value *= Complex64::new(phase.cos(), phase.sin());
            }
        }
    }

    /// Evaluate a sheared-frame spectral field at the lab-frame grid points
    /// (x_i, y_j) at time `t`. The result of a conjugate-symmetric input is a
    /// real field; the roundoff-level imaginary part is dropped.
    pub fn shear_to_lab_values(&self, grid: &Grid, spec: &Array2<Complex64>, t: f64) -> Array2<f64> {
        let mut work = spec.clone();
        self.transform_rows(&mut work, &self.inv_y);
        self.apply_shear_phase(grid, &mut work, t, -1.0);
        self.transform_cols(&mut work, &self.inv_x);
        work.mapv(|c| c.re)
    }

    /// Inverse of [`shear_to_lab_values`](Self::shear_to_lab_values): real lab-grid
    /// values → sheared-frame spectral coefficients (the caller re-applies the
    /// dealias mask and conjugate symmetry).
    pub fn lab_values_to_shear(&self, grid: &Grid, values: &Array2<f64>, t: f64) -> Array2<Complex64> {
        let mut work = values.mapv(|x| Complex64::new(x, 0.0));
        self.transform_cols(&mut work, &self.fwd_x);
        self.apply_shear_phase(grid, &mut work, t, 1.0);
        self.transform_rows(&mut work, &self.fwd_y);
        let scale = 1.0 / (self.nx as f64 * self.ny as f64);
        work.mapv_inplace(|c| c * scale);
        work
    }

    /// Real values of a v-profile → its η-coefficients (1/ny normalized).
    pub fn profile_to_coeffs(&self, values: &[f64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.ny, "profile length must match the grid");
        let mut buf: Vec<Complex64> =
            values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.fwd_y.process(&mut buf);
        let scale = 1.0 / self.ny as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        buf
    }

    /// η-coefficients of a v-profile → its real grid values.
    pub fn coeffs_to_profile(&self, coeffs: &[Complex64]) -> Vec<f64> {
        assert_eq!(coeffs.len(), self.ny, "profile length must match the grid");
        let mut buf = coeffs.to_vec();
        self.inv_y.process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Multiply a spectral field by a complex profile of v alone: for every
    /// row the η-coefficients become the coefficients of profile(v)·row(v).
    /// Used for coefficients that vary across the shear direction (the
    /// coordinate-correction terms and the x-shift e^{i·k·Φ(v)}).
    pub fn multiply_rows_by_v_profile(
        &self,
        spec: &Array2<Complex64>,
        profile_of_row: impl Fn(usize, usize) -> Complex64,
    ) -> Array2<Complex64> {
        let mut work = spec.clone();
        self.transform_rows(&mut work, &self.inv_y);
        for (i, mut row) in work.outer_iter_mut().enumerate() {
            for (j, value) in row.iter_mut().enumerate() {
                *value *= profile_of_row(i, j);
            }
        }
        self.transform_rows(&mut work, &self.fwd_y);
        let scale = 1.0 / self.ny as f64;
        work.mapv_inplace(|c| c * scale);
        work
    }
}

/// Force exact conjugate symmetry ĝ(−k,−η) = conj ĝ(k,η) by averaging each
/// mode with its partner (Nyquist rows/columns have no stored partner and are
/// zeroed; the dealias band never reaches them in practice).
pub fn enforce_conjugate_symmetry(grid: &Grid, field: &mut Array2<Complex64>) {
    let nx = grid.nx;
    let ny = grid.ny;
    for i in 0..nx {
        let k = grid.k_at(i);
        for j in 0..ny {
            let m = grid.j_at(j);
            if k.abs() as usize == nx / 2 || m.abs() as usize == ny / 2 {
                field[(i, j)] = Complex64::new(0.0, 0.0);
                continue;
            }
            // Visit each {(k,m), (−k,−m)} pair once, from its "positive" side.
            if k < 0 || (k == 0 && m < 0) {
                continue;
            }
            let ii = grid.row_of_k(-k).expect("partner row exists off Nyquist");
            let jj = grid.col_of_j(-m).expect("partner column exists off Nyquist");
            if i == ii && j == jj {
                // Self-paired (0,0) mode: must be real.
                let re = field[(i, j)].re;
                field[(i, j)] = Complex64::new(re, 0.0);
                continue;
            }
            let a = field[(i, j)];
            let b = field[(ii, jj)];
            let avg = 0.5 * (a + b.conj());
            field[(i, j)] = avg;
            field[(ii, jj)] = avg.conj();
        }
    }
}

/// Largest |ĝ(k,η) − conj ĝ(−k,−η)| over stored conjugate pairs.
pub fn conjugate_asymmetry(grid: &Grid, field: &Array2<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..grid.nx {
        let k = grid.k_at(i);
        for j in 0..grid.ny {
            let m = grid.j_at(j);
            let (Some(ii), Some(jj)) = (grid.row_of_k(-k), grid.col_of_j(-m)) else {
                continue;
            };
            let gap = (field[(i, j)] - field[(ii, jj)].conj()).norm();
            worst = worst.max(gap);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane_wave(grid: &Grid, k: i64, m: i64, amp: Complex64) -> Array2<f64> {
        let z = grid.z_coords();
        let v = grid.v_coords();
        let eta = m as f64 / grid.ly;
        let mut out = Array2::zeros((grid.nx, grid.ny));
        for i in 0..grid.nx {
            for j in 0..grid.ny {
                let phase = Complex64::new(0.0, k as f64 * z[i] + eta * v[j]).exp();
                out[(i, j)] = (amp * phase + (amp * phase).conj()).re;
            }
        }
        out
    }

    #[test]
    fn forward_then_inverse_is_identity() {
        let grid = Grid::new(16, 32, 8.0).unwrap();
        let ops = FftOps::new(&grid);
        let mut data: Array2<Complex64> = Array2::from_shape_fn((16, 32), |(i, j)| {
            Complex64::new((i as f64 * 0.7).sin(), (j as f64 * 1.3).cos())
        });
        let original = data.clone();
        ops.forward2d(&mut data);
        ops.inverse2d(&mut data);
        let worst = data
            .iter()
            .zip(original.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-13, "round trip error {worst}");
    }

    #[test]
    fn forward_finds_the_plane_wave_coefficient() {
        let grid = Grid::new(32, 16, 4.0).unwrap();
        let ops = FftOps::new(&grid);
        let amp = Complex64::new(0.3, -0.4);
        let mut data = plane_wave(&grid, 5, -3, amp).mapv(|x| Complex64::new(x, 0.0));
        ops.forward2d(&mut data);
        let i = grid.row_of_k(5).unwrap();
        let j = grid.col_of_j(-3).unwrap();
        assert!((data[(i, j)] - amp).norm() < 1e-13);
        let ic = grid.row_of_k(-5).unwrap();
        let jc = grid.col_of_j(3).unwrap();
        assert!((data[(ic, jc)] - amp.conj()).norm() < 1e-13);
        let energy: f64 = data.iter().map(|c| c.norm_sqr()).sum();
        assert!((energy - 2.0 * amp.norm_sqr()).abs() < 1e-13);
    }

    #[test]
    fn parseval_holds_with_forward_normalization() {
        let grid = Grid::new(16, 16, 8.0).unwrap();
        let ops = FftOps::new(&grid);
        let mut data: Array2<Complex64> = Array2::from_shape_fn((16, 16), |(i, j)| {
            Complex64::new((1.0 + i as f64).sin() * (0.5 + j as f64).cos(), 0.0)
        });
        let phys_energy: f64 =
            data.iter().map(|c| c.norm_sqr()).sum::<f64>() / (16.0 * 16.0);
        ops.forward2d(&mut data);
        let spec_energy: f64 = data.iter().map(|c| c.norm_sqr()).sum();
        assert!((phys_energy - spec_energy).abs() < 1e-12 * phys_energy.max(1.0));
    }

    #[test]
    fn lab_evaluation_applies_the_frame_shift() {
        let grid = Grid::new(32, 32, 4.0).unwrap();
        let ops = FftOps::new(&grid);
        let amp = Complex64::new(0.5, 0.25);
        let (k, m) = (2i64, 3i64);
        let eta = m as f64 / grid.ly;
        let mut spec = grid.zero_field();
        spec[(grid.row_of_k(k).unwrap(), grid.col_of_j(m).unwrap())] = amp;
        spec[(grid.row_of_k(-k).unwrap(), grid.col_of_j(-m).unwrap())] = amp.conj();

        let t = 0.37;
        let lab = ops.shear_to_lab_values(&grid, &spec, t);
        let z = grid.z_coords();
        let v = grid.v_coords();
        let mut worst = 0.0f64;
        for i in 0..grid.nx {
            for j in 0..grid.ny {
                // F(z, v) = 2·Re[amp·e^{i(kz+ηv)}] evaluated at z = x − t·y.
                let phase = Complex64::new(0.0, k as f64 * (z[i] - t * v[j]) + eta * v[j]).exp();
                let expect = 2.0 * (amp * phase).re;
                worst = worst.max((lab[(i, j)] - expect).abs());
            }
        }
        assert!(worst < 1e-12, "lab evaluation error {worst}");

        let back = ops.lab_values_to_shear(&grid, &lab, t);
        let gap = back
            .iter()
            .zip(spec.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(gap < 1e-13, "lab round trip error {gap}");
    }

    #[test]
    fn symmetry_enforcement_is_exact_and_detectable() {
        let grid = Grid::new(16, 16, 8.0).unwrap();
        let mut field = Array2::from_shape_fn((16, 16), |(i, j)| {
            Complex64::new(i as f64 - 3.0, j as f64 + 0.5)
        });
        assert!(conjugate_asymmetry(&grid, &field) > 1.0);
        enforce_conjugate_symmetry(&grid, &mut field);
        assert_eq!(conjugate_asymmetry(&grid, &field), 0.0);
        assert_eq!(field[(0, 0)].im, 0.0);
        // Idempotent: a second pass changes nothing.
        let once = field.clone();
        enforce_conjugate_symmetry(&grid, &mut field);
        assert_eq!(once, field);
    }

    #[test]
    fn v_profile_multiplication_matches_the_convolution() {
        let grid = Grid::new(16, 32, 8.0).unwrap();
        let ops = FftOps::new(&grid);
        let mut spec = grid.zero_field();
        let amp = Complex64::new(0.7, -0.2);
        let (i, j) = (grid.row_of_k(3).unwrap(), grid.col_of_j(5).unwrap());
        spec[(i, j)] = amp;

        // Constant profile: pure rescaling.
        let doubled = ops.multiply_rows_by_v_profile(&spec, |_, _| Complex64::new(2.0, 0.0));
        assert!((doubled[(i, j)] - amp * 2.0).norm() < 1e-13);

        // cos(4 v / ly) splits the mode into the two η-neighbours at m ± 4
        // with half the amplitude.
        let v = grid.v_coords();
        let shifted = ops.multiply_rows_by_v_profile(&spec, |_, col| {
            Complex64::new((4.0 * v[col] / grid.ly).cos(), 0.0)
        });
        let up = shifted[(i, grid.col_of_j(9).unwrap())];
        let down = shifted[(i, grid.col_of_j(1).unwrap())];
        assert!((up - amp * 0.5).norm() < 1e-13, "up {up}");
        assert!((down - amp * 0.5).norm() < 1e-13, "down {down}");
        assert!(shifted[(i, j)].norm() < 1e-13);
    }
}
