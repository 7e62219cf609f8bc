//! JSON persistence for trajectories and trajectory measures.
//!
//! A field is stored as a flat array of `6 m` reals, `m` the number of
//! lattice representatives in lattice order: for each mode
//! `[Re c_x, Im c_x, Re c_y, Im c_y, Re c_z, Im c_z]`. Floats are written
//! in shortest round-trip form, so reading a file back reproduces the
//! coefficients bit for bit.
//!
//! A trajectory file holds the box, the mode list, the grid, solver
//! metadata and one field per node. A measure file holds the box, grid,
//! viscosity, forcing segments, weights and the relative paths of its atom
//! files.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::CheckConfig;
use crate::dynamics::{ForcingSegment, ForcingSignal, TimeGrid, Trajectory, TrajectoryMeta};
use crate::error::{Error, Result};
use crate::measure::TrajectoryMeasure;
use crate::spectral::{BoxParams, NonlinearScheme, VelocityField, WaveLattice};

pub const TRAJECTORY_FORMAT: &str = "nsestat-trajectory/1";
pub const MEASURE_FORMAT: &str = "nsestat-measure/1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn of(grid: &TimeGrid) -> Self {
        GridSpec {
            t0: grid.t0(),
            t1: grid.t1(),
            steps: grid.steps(),
        }
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::with_steps(self.t0, self.t1, self.steps)
    }
}

pub fn field_to_reals(u: &VelocityField) -> Vec<f64> {
    u.coeffs().iter().flat_map(|c| c.iter().flat_map(|z| [z.re, z.im])).collect()
}

pub fn field_from_reals(lattice: &Arc<WaveLattice>, data: &[f64]) -> Result<VelocityField> {
    if data.len() != 6 * lattice.len() {
        return Err(Error::invalid(format!(
            "field block has {} reals, expected {}",
            data.len(),
            6 * lattice.len()
        )));
    }
    let coeffs = data
        .chunks_exact(6)
        .map(|b| [0, 1, 2].map(|c| Complex64::new(b[2 * c], b[2 * c + 1])))
        .collect();
    VelocityField::from_coeffs(lattice, coeffs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryFile {
    pub format: String,
    pub lattice: BoxParams,
    pub modes: Vec<[i32; 3]>,
    pub grid: GridSpec,
    pub meta: TrajectoryMeta,
    pub states: Vec<Vec<f64>>,
}

impl TrajectoryFile {
    pub fn of(traj: &Trajectory) -> Self {
        let lat = traj.lattice();
        TrajectoryFile {
            format: TRAJECTORY_FORMAT.into(),
            lattice: *lat.params(),
            modes: lat.modes().to_vec(),
            grid: GridSpec::of(traj.grid()),
            meta: traj.meta().clone(),
            states: traj.states().iter().map(field_to_reals).collect(),
        }
    }

    /// Rebuilds the trajectory on `lattice`, which must match the header.
    pub fn trajectory(&self, lattice: &Arc<WaveLattice>) -> Result<Trajectory> {
        if self.format != TRAJECTORY_FORMAT {
            return Err(Error::invalid(format!("unsupported trajectory format `{}`", self.format)));
        }
        if self.lattice != *lattice.params() || self.modes != lattice.modes() {
            return Err(Error::LatticeMismatch);
        }
        let states = self
            .states
            .iter()
            .map(|s| field_from_reals(lattice, s))
            .collect::<Result<Vec<_>>>()?;
        Trajectory::new(self.grid.grid()?, states, self.meta.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForcingSegmentFile {
    pub start: f64,
    pub end: f64,
    pub field: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureFile {
    pub format: String,
    pub lattice: BoxParams,
    pub grid: GridSpec,
    pub viscosity: f64,
    pub scheme: NonlinearScheme,
    pub forcing: Vec<ForcingSegmentFile>,
    pub weights: Vec<f64>,
    /// Atom files relative to the measure file's directory.
    pub atoms: Vec<String>,
    #[serde(default)]
    pub ladder: Option<Vec<f64>>,
    /// Default check selection carried over from the experiment config.
    #[serde(default)]
    pub checks: CheckConfig,
    #[serde(default)]
    pub config_sha256: String,
}

/// A measure file resolved into memory.
#[derive(Debug, Clone)]
pub struct LoadedMeasure {
    pub path: PathBuf,
    pub lattice: Arc<WaveLattice>,
    pub rho: TrajectoryMeasure,
    pub forcing: ForcingSignal,
    pub viscosity: f64,
    pub scheme: NonlinearScheme,
    pub checks: CheckConfig,
    pub atom_files: Vec<PathBuf>,
}

pub fn forcing_to_file(forcing: &ForcingSignal) -> Vec<ForcingSegmentFile> {
    forcing
        .segments()
        .iter()
        .map(|s| ForcingSegmentFile {
            start: s.start,
            end: s.end,
            field: field_to_reals(&s.field),
        })
        .collect()
}

pub fn forcing_from_file(lattice: &Arc<WaveLattice>, grid: &TimeGrid, segs: &[ForcingSegmentFile]) -> Result<ForcingSignal> {
    let pieces = segs
        .iter()
        .map(|s| {
            Ok(ForcingSegment {
                start: s.start,
                end: s.end,
                field: field_from_reals(lattice, &s.field)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ForcingSignal::new(grid.interval(), pieces)
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| Error::File {
        path: path.display().to_string(),
        source,
    })
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::File {
        path: path.display().to_string(),
        source,
    })
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, bytes: &[u8]) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de)
        .map_err(|e| Error::config(format!("{}:{}", path.display(), e.path()), e.into_inner().to_string()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec(value)?;
    bytes.push(b'\n');
    write_file(path, &bytes)?;
    Ok(bytes)
}

pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<Vec<u8>> {
    write_json(path, &TrajectoryFile::of(traj))
}

pub fn read_trajectory(path: &Path, lattice: &Arc<WaveLattice>) -> Result<Trajectory> {
    let file: TrajectoryFile = parse(path, &read_file(path)?)?;
    file.trajectory(lattice)
}

/// Reads a measure file and every atom file it lists. Malformed or
/// inconsistent files are reported as configuration errors: they are
/// inputs the caller supplied.
pub fn read_measure(path: &Path) -> Result<LoadedMeasure> {
    let file: MeasureFile = parse(path, &read_file(path)?)?;
    let bad = |msg: String| Error::config(path.display().to_string(), msg);
    if file.format != MEASURE_FORMAT {
        return Err(bad(format!("unsupported measure format `{}`", file.format)));
    }
    if file.weights.len() != file.atoms.len() {
        return Err(bad(format!("{} weights for {} atoms", file.weights.len(), file.atoms.len())));
    }
    let lattice = Arc::new(WaveLattice::new(file.lattice).map_err(|e| bad(e.to_string()))?);
    let grid = file.grid.grid().map_err(|e| bad(e.to_string()))?;
    let forcing = forcing_from_file(&lattice, &grid, &file.forcing).map_err(|e| bad(e.to_string()))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut trajs = Vec::with_capacity(file.atoms.len());
    let mut atom_files = Vec::with_capacity(file.atoms.len());
    for name in &file.atoms {
        let p = dir.join(name);
        let traj = match read_trajectory(&p, &lattice) {
            Err(e @ (Error::File { .. } | Error::Config { .. })) => return Err(e),
            Err(e) => return Err(Error::config(p.display().to_string(), e.to_string())),
            Ok(t) => t,
        };
        trajs.push(traj);
        atom_files.push(p);
    }
    let rho = TrajectoryMeasure::new(trajs, file.weights.clone()).map_err(|e| bad(e.to_string()))?;
    Ok(LoadedMeasure {
        path: path.to_path_buf(),
        lattice,
        rho,
        forcing,
        viscosity: file.viscosity,
        scheme: file.scheme,
        checks: file.checks,
        atom_files,
    })
}
