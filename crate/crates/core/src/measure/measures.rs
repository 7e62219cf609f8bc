use std::sync::Arc;

use crate::dynamics::{TimeGrid, Trajectory};
use crate::error::{Error, Result};
use crate::spectral::{galerkin_project, VelocityField, WaveLattice};

/// Weight sums within this distance of 1 are renormalized; others are rejected.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

fn normalize_weights(weights: &[f64]) -> Result<Vec<f64>> {
    if weights.is_empty() {
        return Err(Error::Measure("a measure needs at least one atom".into()));
    }
    for (j, &w) in weights.iter().enumerate() {
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::Measure(format!("weight {j} must be positive and finite, got {w}")));
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::Measure(format!("weights sum to {sum}, expected 1")));
    }
    if sum == 1.0 {
        Ok(weights.to_vec())
    } else {
        Ok(weights.iter().map(|w| w / sum).collect())
    }
}

/// Weighted sum accumulated in atom order.
pub(crate) fn ordered_sum(weights: &[f64], values: impl Iterator<Item = f64>) -> f64 {
    let mut acc = 0.0;
    for (w, v) in weights.iter().zip(values) {
        acc += w * v;
    }
    acc
}

/// Finitely supported probability measure on the phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMeasure {
    atoms: Vec<VelocityField>,
    weights: Vec<f64>,
}

impl PhaseMeasure {
    pub fn new(atoms: Vec<VelocityField>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::Measure(format!("{} atoms but {} weights", atoms.len(), weights.len())));
        }
        let weights = normalize_weights(&weights)?;
        let lat = atoms[0].lattice();
        if atoms.iter().any(|a| !a.lattice().same_as(lat)) {
            return Err(Error::LatticeMismatch);
        }
        Ok(PhaseMeasure { atoms, weights })
    }

    pub fn dirac(u: VelocityField) -> Self {
        PhaseMeasure {
            atoms: vec![u],
            weights: vec![1.0],
        }
    }

    /// Equal weights `1/n`.
    pub fn uniform(atoms: Vec<VelocityField>) -> Result<Self> {
        let n = atoms.len().max(1);
        PhaseMeasure::new(atoms, vec![1.0 / n as f64; n])
    }

    pub fn atoms(&self) -> &[VelocityField] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn lattice(&self) -> &Arc<WaveLattice> {
        self.atoms[0].lattice()
    }

    pub fn expect<F: Fn(&VelocityField) -> f64>(&self, functional: F) -> f64 {
        ordered_sum(&self.weights, self.atoms.iter().map(functional))
    }

    pub fn mean_energy(&self) -> f64 {
        self.expect(|u| u.energy())
    }

    pub fn mean_enstrophy(&self) -> f64 {
        self.expect(|u| u.enstrophy())
    }

    pub fn max_norm(&self) -> f64 {
        self.atoms.iter().map(|u| u.norm()).fold(0.0, f64::max)
    }

    pub fn galerkin_pushforward(&self, m: usize) -> Result<PhaseMeasure> {
        let atoms = self.atoms.iter().map(|u| galerkin_project(u, m)).collect::<Result<Vec<_>>>()?;
        Ok(PhaseMeasure {
            atoms,
            weights: self.weights.clone(),
        })
    }
}

pub fn make_phase_measure(atoms: Vec<VelocityField>, weights: Vec<f64>) -> Result<PhaseMeasure> {
    PhaseMeasure::new(atoms, weights)
}

pub fn expect<F: Fn(&VelocityField) -> f64>(mu: &PhaseMeasure, functional: F) -> f64 {
    mu.expect(functional)
}

pub fn mean_energy(mu: &PhaseMeasure) -> f64 {
    mu.mean_energy()
}

pub fn mean_enstrophy(mu: &PhaseMeasure) -> f64 {
    mu.mean_enstrophy()
}

pub fn galerkin_pushforward(mu: &PhaseMeasure, m: usize) -> Result<PhaseMeasure> {
    mu.galerkin_pushforward(m)
}

/// Finitely supported probability measure on trajectory space; every atom
/// lives on the same grid and lattice.
#[derive(Debug, Clone)]
pub struct TrajectoryMeasure {
    atoms: Vec<Trajectory>,
    weights: Vec<f64>,
}

impl TrajectoryMeasure {
    pub fn new(atoms: Vec<Trajectory>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::Measure(format!("{} atoms but {} weights", atoms.len(), weights.len())));
        }
        let weights = normalize_weights(&weights)?;
        let first = &atoms[0];
        for (j, a) in atoms.iter().enumerate() {
            if !a.grid().same_as(first.grid()) {
                return Err(Error::Measure(format!("atom {j} lives on a different time grid")));
            }
            if !a.lattice().same_as(first.lattice()) {
                return Err(Error::LatticeMismatch);
            }
        }
        Ok(TrajectoryMeasure { atoms, weights })
    }

    pub fn atoms(&self) -> &[Trajectory] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn grid(&self) -> &TimeGrid {
        self.atoms[0].grid()
    }

    pub fn lattice(&self) -> &Arc<WaveLattice> {
        self.atoms[0].lattice()
    }

    /// Time marginal at a grid node.
    pub fn project_at(&self, t: f64) -> Result<PhaseMeasure> {
        let i = self.grid().index_of(t)?;
        Ok(self.marginal(i))
    }

    pub fn marginal(&self, node: usize) -> PhaseMeasure {
        PhaseMeasure {
            atoms: self.atoms.iter().map(|a| a.states()[node].clone()).collect(),
            weights: self.weights.clone(),
        }
    }

    pub fn expect<F: Fn(&Trajectory) -> f64>(&self, functional: F) -> f64 {
        ordered_sum(&self.weights, self.atoms.iter().map(functional))
    }
}

pub fn make_trajectory_measure(atoms: Vec<Trajectory>, weights: Vec<f64>) -> Result<TrajectoryMeasure> {
    TrajectoryMeasure::new(atoms, weights)
}

pub fn project_at(rho: &TrajectoryMeasure, t: f64) -> Result<PhaseMeasure> {
    rho.project_at(t)
}
