//! Binary checkpoint files for spectral states.
//!
//! Layout (all little-endian): magic `CBLB`, format version u32, nx u32,
//! ny u32, ly f64, t f64, then the vorticity and density coefficient arrays
//! row-major as (re, im) f64 pairs. A run directory holds one file per
//! checkpoint named `snap_NNN.cblb` in time order.

use std::fs;
use std::io::{self, Read as _, Write as _};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use thiserror::Error;

use crate::grid::{Grid, GridError};
use crate::solver::{SimState, SpectralField};

const MAGIC: [u8; 4] = *b"CBLB";
const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("not a checkpoint file: bad magic bytes")]
    BadMagic,
    #[error("unsupported checkpoint format version {0}")]
    UnsupportedVersion(u32),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("checkpoint payload ends early: expected {expected} bytes, got {got}")]
    Truncated { expected: usize, got: usize },
    #[error("checkpoint holds a non-finite value")]
    NonFinite,
    #[error("no checkpoint files found in {0}")]
    EmptyRun(PathBuf),
    #[error("checkpoint {0} disagrees with the run's grid")]
    GridMismatch(PathBuf),
    #[error("checkpoint times are not strictly increasing at {0}")]
    TimeOrder(PathBuf),
}

/// Canonical file name of checkpoint number `index` within a run directory.
pub fn snapshot_filename(index: usize) -> String {
    format!("snap_{index:03}.cblb")
}

pub fn write_snapshot(path: &Path, grid: &Grid, state: &SimState) -> Result<(), SnapshotError> {
    let mut buf: Vec<u8> =
        Vec::with_capacity(32 + 32 * grid.nx * grid.ny);
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(grid.nx as u32).to_le_bytes());
    buf.extend_from_slice(&(grid.ny as u32).to_le_bytes());
    buf.extend_from_slice(&grid.ly.to_le_bytes());
    buf.extend_from_slice(&state.t.to_le_bytes());
    for field in [&state.omega, &state.theta] {
        for c in field.iter() {
            buf.extend_from_slice(&c.re.to_le_bytes());
            buf.extend_from_slice(&c.im.to_le_bytes());
        }
    }
    let mut file = io::BufWriter::new(fs::File::create(path)?);
    file.write_all(&buf)?;
    file.flush()?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<(Grid, SimState), SnapshotError> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 32 {
        return Err(SnapshotError::Truncated { expected: 32, got: bytes.len() });
    }
    if bytes[0..4] != MAGIC {
        return Err(SnapshotError::BadMagic);
    }
    let u32_at = |offset: usize| u32::from_le_bytes(bytes[offset..offset + 4].try_into().unwrap());
    let f64_at = |offset: usize| f64::from_le_bytes(bytes[offset..offset + 8].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(SnapshotError::UnsupportedVersion(version));
    }
    let nx = u32_at(8) as usize;
    let ny = u32_at(12) as usize;
    let ly = f64_at(16);
    let t = f64_at(24);
    let grid = Grid::new(nx, ny, ly)?;
    let expected = 32 + 32 * nx * ny;
    if bytes.len() != expected {
        return Err(SnapshotError::Truncated { expected, got: bytes.len() });
    }

    let mut offset = 32usize;
    let mut read_field = || -> SpectralField {
        let mut field = grid.zero_field();
        for value in field.iter_mut() {
            *value = Complex64::new(f64_at(offset), f64_at(offset + 8));
            offset += 16;
        }
        field
    };
    let omega = read_field();
    let theta = read_field();
    if !t.is_finite()
        || !omega
            .iter()
            .chain(theta.iter())
            .all(|c| c.re.is_finite() && c.im.is_finite())
    {
        return Err(SnapshotError::NonFinite);
    }
    Ok((grid, SimState { t, omega, theta }))
}

/// Write every checkpoint of a run into `dir` with canonical names.
pub fn write_run(dir: &Path, grid: &Grid, snapshots: &[SimState]) -> Result<(), SnapshotError> {
    fs::create_dir_all(dir)?;
    for (index, state) in snapshots.iter().enumerate() {
        write_snapshot(&dir.join(snapshot_filename(index)), grid, state)?;
    }
    Ok(())
}

/// Read back a run directory: all `snap_*.cblb` files in name order, checked
/// for one common grid and strictly increasing times.
pub fn read_run(dir: &Path) -> Result<(Grid, Vec<SimState>), SnapshotError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|ext| ext == "cblb")
                && p.file_stem()
                    .and_then(|s| s.to_str())
                    .is_some_and(|s| s.starts_with("snap_"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(SnapshotError::EmptyRun(dir.to_path_buf()));
    }
    let (grid, first) = read_snapshot(&paths[0])?;
    let mut snapshots = vec![first];
    for path in &paths[1..] {
        let (other, state) = read_snapshot(path)?;
        if other != grid {
            return Err(SnapshotError::GridMismatch(path.clone()));
        }
        if state.t <= snapshots.last().expect("nonempty").t {
            return Err(SnapshotError::TimeOrder(path.clone()));
        }
        snapshots.push(state);
    }
    Ok((grid, snapshots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{init_perturbation, SimConfig};

    #[test]
    fn snapshot_round_trip_is_bitwise_exact() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid::new(32, 16, 4.0).unwrap();
        let mut cfg = SimConfig::buoyant_baseline();
        cfg.seed = 11;
        let mut state = init_perturbation(&grid, &cfg).unwrap();
        state.t = 3.25;
        let path = dir.path().join("snap_000.cblb");
        write_snapshot(&path, &grid, &state).unwrap();
        let (grid_back, state_back) = read_snapshot(&path).unwrap();
        assert_eq!(grid_back, grid);
        assert_eq!(state_back, state);
    }

    #[test]
    fn corrupt_headers_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid::new(8, 8, 4.0).unwrap();
        let state = SimState { t: 0.0, omega: grid.zero_field(), theta: grid.zero_field() };
        let path = dir.path().join("snap_000.cblb");
        write_snapshot(&path, &grid, &state).unwrap();

        let good = fs::read(&path).unwrap();
        let mut bad_magic = good.clone();
        bad_magic[0] = b'X';
        fs::write(&path, &bad_magic).unwrap();
        assert!(matches!(read_snapshot(&path), Err(SnapshotError::BadMagic)));

        let mut bad_version = good.clone();
        bad_version[4] = 99;
        fs::write(&path, &bad_version).unwrap();
        assert!(matches!(
            read_snapshot(&path),
            Err(SnapshotError::UnsupportedVersion(99))
        ));

        let truncated = &good[..good.len() - 8];
        fs::write(&path, truncated).unwrap();
        assert!(matches!(read_snapshot(&path), Err(SnapshotError::Truncated { .. })));
    }

    #[test]
    fn run_directories_round_trip_and_validate_order() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid::new(16, 16, 8.0).unwrap();
        let cfg = SimConfig::buoyant_baseline();
        let base = init_perturbation(&grid, &cfg).unwrap();
        let mut snaps = Vec::new();
        for step in 0..4 {
            let mut s = base.clone();
            s.t = step as f64;
            snaps.push(s);
        }
        write_run(dir.path(), &grid, &snaps).unwrap();
        let (grid_back, snaps_back) = read_run(dir.path()).unwrap();
        assert_eq!(grid_back, grid);
        assert_eq!(snaps_back.len(), 4);
        assert_eq!(snaps_back[2].t, 2.0);

        // Duplicate time must be rejected.
        let mut dup = base.clone();
        dup.t = 3.0;
        write_snapshot(&dir.path().join(snapshot_filename(4)), &grid, &dup).unwrap();
        assert!(matches!(read_run(dir.path()), Err(SnapshotError::TimeOrder(_))));

        let empty = tempfile::tempdir().unwrap();
        assert!(matches!(read_run(empty.path()), Err(SnapshotError::EmptyRun(_))));
    }
}
