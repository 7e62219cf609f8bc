use crate::dynamics::{ForcingSignal, GalerkinSystem, TimeGrid, Trajectory};
use crate::error::{Error, Result};
use crate::measure::{annuli_split, PhaseMeasure, RadiiLadder, TrajectoryMeasure};
use crate::spectral::NonlinearScheme;

/// Parameters of the ensemble construction.
#[derive(Debug, Clone)]
pub struct VFBuildConfig {
    pub grid: TimeGrid,
    pub viscosity: f64,
    pub forcing: ForcingSignal,
    /// Optional annuli decomposition of the initial measure.
    pub ladder: Option<RadiiLadder>,
    pub scheme: NonlinearScheme,
}

impl VFBuildConfig {
    pub fn new(grid: TimeGrid, viscosity: f64, forcing: ForcingSignal) -> Self {
        VFBuildConfig {
            grid,
            viscosity,
            forcing,
            ladder: None,
            scheme: NonlinearScheme::default(),
        }
    }

    pub fn with_ladder(mut self, ladder: RadiiLadder) -> Self {
        self.ladder = Some(ladder);
        self
    }

    pub fn with_scheme(mut self, scheme: NonlinearScheme) -> Self {
        self.scheme = scheme;
        self
    }
}

fn tag_atom(err: Error, j: usize) -> Error {
    match err {
        Error::Integration { t, reason, .. } => Error::Integration { t, reason, atom: Some(j) },
        other => other,
    }
}

/// Integrates one trajectory per atom of `mu0` and carries the weights over.
///
/// With a ladder, atoms are processed annulus by annulus (the structure of
/// the decomposition argument) and the annulus measures are recombined with
/// their masses. The recombined weights are the source weights themselves,
/// so the time-`t0` marginal reproduces `mu0` bit for bit.
pub fn construct_vf_measure(mu0: &PhaseMeasure, cfg: &VFBuildConfig) -> Result<TrajectoryMeasure> {
    if !mu0.lattice().same_as(cfg.forcing.lattice()) {
        return Err(Error::LatticeMismatch);
    }
    let system = GalerkinSystem::new(mu0.lattice(), cfg.viscosity, cfg.scheme)?;
    let order: Vec<usize> = match &cfg.ladder {
        None => (0..mu0.len()).collect(),
        Some(ladder) => annuli_split(mu0, ladder)?.into_iter().flat_map(|p| p.source).collect(),
    };
    let mut slots: Vec<Option<Trajectory>> = vec![None; mu0.len()];
    for j in order {
        let traj = system
            .integrate(&mu0.atoms()[j], &cfg.grid, &cfg.forcing)
            .map_err(|e| tag_atom(e, j))?;
        slots[j] = Some(traj);
    }
    let atoms = slots.into_iter().map(|s| s.expect("every atom is routed exactly once")).collect();
    TrajectoryMeasure::new(atoms, mu0.weights().to_vec())
}
