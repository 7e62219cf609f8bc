use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::grid::{Interval, TimeGrid, NODE_TOL};
use crate::error::{Error, Result};
use crate::spectral::{VelocityField, WaveLattice};

/// Junction tolerance for pasting, relative to the larger junction state.
pub const PASTE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub solver: String,
    pub viscosity: f64,
    /// Set on manufactured witnesses that are not solutions of the ODE.
    #[serde(default)]
    pub synthetic: bool,
}

/// Galerkin trajectory: one state per grid node.
#[derive(Debug, Clone)]
pub struct Trajectory {
    grid: TimeGrid,
    states: Vec<VelocityField>,
    meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn new(grid: TimeGrid, states: Vec<VelocityField>, meta: TrajectoryMeta) -> Result<Self> {
        if states.len() != grid.len() {
            return Err(Error::invalid(format!(
                "{} states for {} grid nodes",
                states.len(),
                grid.len()
            )));
        }
        let first = &states[0];
        for (i, s) in states.iter().enumerate() {
            first.check_lattice(s)?;
            if !s.is_finite() {
                return Err(Error::Integration {
                    t: grid.node(i),
                    reason: "non-finite state".into(),
                    atom: None,
                });
            }
        }
        Ok(Trajectory { grid, states, meta })
    }

    /// Constant trajectory `u(t) = u` on `grid`.
    pub fn constant(grid: TimeGrid, u: VelocityField, meta: TrajectoryMeta) -> Self {
        let states = vec![u; grid.len()];
        Trajectory { grid, states, meta }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn states(&self) -> &[VelocityField] {
        &self.states
    }

    pub fn meta(&self) -> &TrajectoryMeta {
        &self.meta
    }

    pub fn lattice(&self) -> &Arc<WaveLattice> {
        self.states[0].lattice()
    }

    pub fn initial(&self) -> &VelocityField {
        &self.states[0]
    }

    pub fn last(&self) -> &VelocityField {
        self.states.last().expect("nonempty trajectory")
    }

    pub fn index_of(&self, t: f64) -> Result<usize> {
        self.grid.index_of(t)
    }

    /// `Pi_t u`: the stored state at node `t`. No interpolation.
    pub fn sample_at(&self, t: f64) -> Result<&VelocityField> {
        Ok(&self.states[self.grid.index_of(t)?])
    }

    /// `Pi_J u` for `J = [a, b]` with grid-node endpoints.
    pub fn restrict(&self, a: f64, b: f64) -> Result<Trajectory> {
        if !(a < b) {
            return Err(Error::InvalidInterval(format!(
                "restriction needs a nondegenerate interval, got [{a}, {b}]"
            )));
        }
        let i = self.grid.index_of(a)?;
        let j = self.grid.index_of(b)?;
        let grid = TimeGrid::with_steps(self.grid.node(i), self.grid.node(j), j - i)?;
        Ok(Trajectory {
            grid,
            states: self.states[i..=j].to_vec(),
            meta: self.meta.clone(),
        })
    }

    pub fn energies(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.energy()).collect()
    }

    /// Synthetic witness with the kinetic energy raised by `excess` at every
    /// node in `(t0, t0 + delta]`, by rescaling those states. The start
    /// state is untouched, so the energy jumps right after `t0`.
    pub fn inject_energy_jump(&self, delta: f64, excess: f64) -> Result<Trajectory> {
        if !(excess > 0.0) {
            return Err(Error::invalid("jump excess must be positive"));
        }
        let end = self.grid.index_of(self.grid.t0() + delta)?;
        if end == 0 {
            return Err(Error::invalid("jump window must contain a node after t0"));
        }
        let mut states = self.states.clone();
        for s in states.iter_mut().take(end + 1).skip(1) {
            let e = s.energy();
            if e == 0.0 {
                return Err(Error::invalid("cannot rescale a zero state"));
            }
            *s = s.scaled(((e + excess) / e).sqrt());
        }
        let mut meta = self.meta.clone();
        meta.synthetic = true;
        Ok(Trajectory {
            grid: self.grid,
            states,
            meta,
        })
    }

    pub fn interval(&self) -> Interval {
        self.grid.interval()
    }
}

/// Concatenates `first` on `[t1, t2]` with `second` on `[t2, t3]`.
pub fn paste(first: &Trajectory, second: &Trajectory) -> Result<Trajectory> {
    let (dt1, dt2) = (first.grid.dt(), second.grid.dt());
    if (dt1 - dt2).abs() > 1e-12 * dt1 {
        return Err(Error::StepMismatch(dt1, dt2));
    }
    if (first.grid.t1() - second.grid.t0()).abs() > NODE_TOL * dt1 {
        return Err(Error::InvalidInterval(format!(
            "first ends at {}, second starts at {}",
            first.grid.t1(),
            second.grid.t0()
        )));
    }
    let a = first.last();
    let b = second.initial();
    a.check_lattice(b)?;
    let scale = a.norm().max(b.norm());
    let diff = a.sub(b)?.norm();
    let relative = if scale == 0.0 { diff } else { diff / scale };
    if relative > PASTE_TOL {
        return Err(Error::JunctionMismatch { relative });
    }
    let grid = TimeGrid::with_steps(
        first.grid.t0(),
        second.grid.t1(),
        first.grid.steps() + second.grid.steps(),
    )?;
    let mut states = first.states.clone();
    states.extend_from_slice(&second.states[1..]);
    Ok(Trajectory {
        grid,
        states,
        meta: first.meta.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::BoxParams;

    fn lat() -> Arc<WaveLattice> {
        Arc::new(WaveLattice::new(BoxParams::periodic_cube(0.1, 1).unwrap()).unwrap())
    }

    fn meta() -> TrajectoryMeta {
        TrajectoryMeta {
            solver: "test".into(),
            viscosity: 0.1,
            synthetic: false,
        }
    }

    fn ramp() -> Trajectory {
        let l = lat();
        let grid = TimeGrid::new(0.0, 1.0, 0.125).unwrap();
        let states = (0..grid.len())
            .map(|i| VelocityField::eigenmode(&l, [1, 0, 0], 0, 1.0 + i as f64).unwrap())
            .collect();
        Trajectory::new(grid, states, meta()).unwrap()
    }

    #[test]
    fn sampling_is_node_exact() {
        let tr = ramp();
        assert_eq!(tr.sample_at(0.0).unwrap(), tr.initial());
        assert_eq!(tr.sample_at(1.0).unwrap(), tr.last());
        assert!(matches!(tr.sample_at(0.3), Err(Error::OffGrid { .. })));
    }

    #[test]
    fn restriction_algebra() {
        let tr = ramp();
        let full = tr.restrict(0.0, 1.0).unwrap();
        assert_eq!(full.states(), tr.states());
        assert!(tr.restrict(0.0, 0.0).is_err());
        assert!(tr.restrict(0.1, 0.5).is_err());
        let twice = tr.restrict(0.25, 0.875).unwrap().restrict(0.5, 0.75).unwrap();
        let once = tr.restrict(0.5, 0.75).unwrap();
        assert_eq!(twice.states(), once.states());
        assert_eq!(twice.grid(), once.grid());
    }

    #[test]
    fn paste_round_trip_and_mismatch() {
        let tr = ramp();
        let a = tr.restrict(0.0, 0.5).unwrap();
        let b = tr.restrict(0.5, 1.0).unwrap();
        let back = paste(&a, &b).unwrap();
        assert_eq!(back.states(), tr.states());
        assert!(back.grid().same_as(tr.grid()));

        let l = lat();
        let mut states = b.states().to_vec();
        let bump = VelocityField::eigenmode(&l, [0, 1, 0], 0, 1e-3 * states[0].norm()).unwrap();
        states[0] = states[0].add_scaled(1.0, &bump).unwrap();
        let shifted = Trajectory::new(*b.grid(), states, meta()).unwrap();
        assert!(matches!(paste(&a, &shifted), Err(Error::JunctionMismatch { .. })));

        let coarse = Trajectory::constant(TimeGrid::new(0.5, 1.0, 0.25).unwrap(), b.initial().clone(), meta());
        assert!(matches!(paste(&a, &coarse), Err(Error::StepMismatch(..))));
    }

    #[test]
    fn jump_injection_raises_energy_on_window() {
        let tr = ramp();
        let j = tr.inject_energy_jump(0.25, 2.0).unwrap();
        assert!(j.meta().synthetic);
        assert_eq!(j.initial(), tr.initial());
        for i in 1..=2 {
            let d = j.states()[i].energy() - tr.states()[i].energy();
            assert!((d - 2.0).abs() < 1e-12);
        }
        assert_eq!(j.states()[3], tr.states()[3]);
    }
}
