//! Energy-type inequalities of a single trajectory, evaluated by trapezoid
//! quadrature on the trajectory's own grid.

use serde::{Deserialize, Serialize};

use super::psi::PsiFunction;
use super::report::{InequalityReport, SweepSummary};
use crate::dynamics::{ForcingSignal, Trajectory};
use crate::error::{Error, Result};
use crate::spectral::l2_inner_unchecked;

pub const ENERGY_TAG: &str = "energy_inequality";
pub const STRENGTHENED_TAG: &str = "strengthened_energy_inequality";
pub const APRIORI_TAG: &str = "apriori_bound";
pub const DECAY_TAG: &str = "decay_envelope";

/// Node data of one trajectory against one forcing signal: `|u|^2`,
/// `||u||^2` and the work `(f, u)` at both ends of each step.
///
/// The work is stored per step because the forcing may jump at a node; the
/// left and right values use the step's own forcing.
#[derive(Debug, Clone)]
pub struct EnergyProfile {
    times: Vec<f64>,
    dt: f64,
    viscosity: f64,
    energy: Vec<f64>,
    enstrophy: Vec<f64>,
    work_left: Vec<f64>,
    work_right: Vec<f64>,
}

impl EnergyProfile {
    pub fn new(traj: &Trajectory, viscosity: f64, forcing: &ForcingSignal) -> Result<Self> {
        if !(viscosity > 0.0) {
            return Err(Error::invalid(format!("viscosity must be positive, got {viscosity}")));
        }
        if !forcing.lattice().same_as(traj.lattice()) {
            return Err(Error::LatticeMismatch);
        }
        let grid = traj.grid();
        if !forcing.covers(grid.t0(), grid.t1()) {
            return Err(Error::Forcing(format!(
                "forcing does not cover [{}, {}]",
                grid.t0(),
                grid.t1()
            )));
        }
        let states = traj.states();
        let times = grid.nodes();
        let mut work_left = Vec::with_capacity(grid.steps());
        let mut work_right = Vec::with_capacity(grid.steps());
        for n in 0..grid.steps() {
            let f = forcing.on_step(times[n], times[n + 1]);
            work_left.push(l2_inner_unchecked(f, &states[n]));
            work_right.push(l2_inner_unchecked(f, &states[n + 1]));
        }
        Ok(EnergyProfile {
            dt: grid.dt(),
            viscosity,
            energy: states.iter().map(|u| u.energy()).collect(),
            enstrophy: states.iter().map(|u| u.enstrophy()).collect(),
            work_left,
            work_right,
            times,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn energies(&self) -> &[f64] {
        &self.energy
    }

    pub fn enstrophies(&self) -> &[f64] {
        &self.enstrophy
    }

    pub fn viscosity(&self) -> f64 {
        self.viscosity
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Cumulative quadratures for the ψ-weighted energy balance.
    pub fn ledger(&self, psi: PsiFunction) -> EnergyLedger {
        let n = self.energy.len();
        let half_dt = 0.5 * self.dt;
        let mut half_psi = Vec::with_capacity(n);
        let mut dissipation = Vec::with_capacity(n);
        let mut work = Vec::with_capacity(n);
        let (mut d, mut w) = (0.0, 0.0);
        for i in 0..n {
            if i > 0 {
                let (pa, pb) = (psi.derivative(self.energy[i - 1]), psi.derivative(self.energy[i]));
                d += half_dt * (pa * self.enstrophy[i - 1] + pb * self.enstrophy[i]);
                w += half_dt * (pa * self.work_left[i - 1] + pb * self.work_right[i - 1]);
            }
            half_psi.push(0.5 * psi.value(self.energy[i]));
            dissipation.push(self.viscosity * d);
            work.push(w);
        }
        EnergyLedger {
            times: self.times.clone(),
            half_psi,
            dissipation,
            work,
        }
    }
}

/// Cumulative sides of `1/2 psi(|u(t)|^2) + nu int psi' ||u||^2 <= 1/2 psi(|u(t')|^2) + int psi' (f,u)`.
///
/// A ledger is linear in its entries, so the ledger of a measure is the
/// weighted sum of the atoms' ledgers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub times: Vec<f64>,
    pub half_psi: Vec<f64>,
    /// `nu * int_{t0}^{t_i} psi'(|u|^2) ||u||^2`.
    pub dissipation: Vec<f64>,
    /// `int_{t0}^{t_i} psi'(|u|^2) (f, u)`.
    pub work: Vec<f64>,
}

impl EnergyLedger {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Weighted sum of ledgers on a common grid, in the order given.
    pub fn combine(parts: &[(f64, &EnergyLedger)]) -> Result<EnergyLedger> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Measure("cannot combine an empty set of ledgers".into()))?
            .1;
        let n = first.len();
        let mut out = EnergyLedger {
            times: first.times.clone(),
            half_psi: vec![0.0; n],
            dissipation: vec![0.0; n],
            work: vec![0.0; n],
        };
        for (w, l) in parts {
            if l.len() != n {
                return Err(Error::Measure("ledgers live on different grids".into()));
            }
            for i in 0..n {
                out.half_psi[i] += w * l.half_psi[i];
                out.dissipation[i] += w * l.dissipation[i];
                out.work[i] += w * l.work[i];
            }
        }
        Ok(out)
    }

    pub fn lhs(&self, i: usize, j: usize) -> f64 {
        self.half_psi[j] + (self.dissipation[j] - self.dissipation[i])
    }

    pub fn rhs(&self, i: usize, j: usize) -> f64 {
        self.half_psi[i] + (self.work[j] - self.work[i])
    }

    pub fn report(&self, check: &str, i: usize, j: usize, tol: f64) -> InequalityReport {
        InequalityReport::new(check, self.times[i], self.times[j], self.lhs(i, j), self.rhs(i, j), tol)
    }

    /// `rhs - lhs` for every ordered node pair `i < j`, row-major.
    pub fn defects(&self) -> Vec<f64> {
        let n = self.len();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push(self.rhs(i, j) - self.lhs(i, j));
            }
        }
        out
    }

    /// Largest magnitude entering either side; used to floor tolerances.
    pub fn scale(&self) -> f64 {
        self.half_psi
            .iter()
            .chain(&self.dissipation)
            .chain(&self.work)
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn sweep(&self, check: &str, tol: f64) -> Option<SweepSummary> {
        let n = self.len();
        SweepSummary::collect(
            check,
            (0..n).flat_map(move |i| (i + 1..n).map(move |j| self.report(check, i, j, tol))),
        )
    }
}

fn node_pair(traj: &Trajectory, t_prime: f64, t: f64) -> Result<(usize, usize)> {
    let i = traj.index_of(t_prime)?;
    let j = traj.index_of(t)?;
    if i >= j {
        return Err(Error::InvalidInterval(format!("need t' < t, got t'={t_prime}, t={t}")));
    }
    Ok((i, j))
}

/// Energy inequality between two grid nodes.
pub fn energy_inequality(
    traj: &Trajectory,
    t_prime: f64,
    t: f64,
    viscosity: f64,
    forcing: &ForcingSignal,
    tol: f64,
) -> Result<InequalityReport> {
    let (i, j) = node_pair(traj, t_prime, t)?;
    let ledger = EnergyProfile::new(traj, viscosity, forcing)?.ledger(PsiFunction::Linear);
    Ok(ledger.report(ENERGY_TAG, i, j, tol))
}

/// ψ-weighted energy inequality. With [`PsiFunction::Linear`] the numbers
/// coincide with [`energy_inequality`]; only the tag differs.
pub fn strengthened_energy_inequality(
    traj: &Trajectory,
    psi: PsiFunction,
    t_prime: f64,
    t: f64,
    viscosity: f64,
    forcing: &ForcingSignal,
    tol: f64,
) -> Result<InequalityReport> {
    let (i, j) = node_pair(traj, t_prime, t)?;
    let ledger = EnergyProfile::new(traj, viscosity, forcing)?.ledger(psi);
    Ok(ledger.report(STRENGTHENED_TAG, i, j, tol))
}

/// `|u(t)|^2 + nu int ||u||^2 <= |u(t')|^2 + ||f||^2_inf (t - t') / (nu lambda1)`.
pub fn apriori_bound(
    traj: &Trajectory,
    t_prime: f64,
    t: f64,
    viscosity: f64,
    forcing: &ForcingSignal,
    lambda1: f64,
    tol: f64,
) -> Result<InequalityReport> {
    let (i, j) = node_pair(traj, t_prime, t)?;
    let profile = EnergyProfile::new(traj, viscosity, forcing)?;
    Ok(apriori_row(&profile, &profile.ledger(PsiFunction::Linear), forcing, lambda1, i, j, tol))
}

pub(crate) fn apriori_row(
    profile: &EnergyProfile,
    linear: &EnergyLedger,
    forcing: &ForcingSignal,
    lambda1: f64,
    i: usize,
    j: usize,
    tol: f64,
) -> InequalityReport {
    let (a, b) = (profile.times[i], profile.times[j]);
    let fsup = forcing.ess_sup_norm_on(a, b);
    let nu = profile.viscosity;
    let lhs = profile.energy[j] + (linear.dissipation[j] - linear.dissipation[i]);
    let rhs = profile.energy[i] + fsup * fsup * (b - a) / (nu * lambda1);
    InequalityReport::new(APRIORI_TAG, a, b, lhs, rhs, tol)
}

/// `|u(t)|^2 <= |u(t')|^2 e^{-nu lambda1 (t-t')} + ||f||^2_inf (1 - e^{-nu lambda1 (t-t')}) / (nu lambda1)^2`.
pub fn decay_envelope(
    traj: &Trajectory,
    t_prime: f64,
    t: f64,
    viscosity: f64,
    forcing: &ForcingSignal,
    lambda1: f64,
    tol: f64,
) -> Result<InequalityReport> {
    let (i, j) = node_pair(traj, t_prime, t)?;
    let profile = EnergyProfile::new(traj, viscosity, forcing)?;
    Ok(decay_row(&profile, forcing, lambda1, i, j, tol))
}

pub(crate) fn decay_row(
    profile: &EnergyProfile,
    forcing: &ForcingSignal,
    lambda1: f64,
    i: usize,
    j: usize,
    tol: f64,
) -> InequalityReport {
    let (a, b) = (profile.times[i], profile.times[j]);
    let fsup = forcing.ess_sup_norm_on(a, b);
    let rate = profile.viscosity * lambda1;
    let decay = (-rate * (b - a)).exp();
    let rhs = profile.energy[i] * decay - fsup * fsup / (rate * rate) * (-rate * (b - a)).exp_m1();
    InequalityReport::new(DECAY_TAG, a, b, profile.energy[j], rhs, tol)
}

/// All four energy checks over every node pair of one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySweep {
    pub energy: SweepSummary,
    pub strengthened: Vec<(PsiFunction, SweepSummary)>,
    pub apriori: SweepSummary,
    pub decay: SweepSummary,
}

impl EnergySweep {
    pub fn passed(&self) -> bool {
        self.energy.passed()
            && self.apriori.passed()
            && self.decay.passed()
            && self.strengthened.iter().all(|(_, s)| s.passed())
    }
}

pub fn sweep_energy_checks(
    traj: &Trajectory,
    viscosity: f64,
    forcing: &ForcingSignal,
    lambda1: f64,
    psis: &[PsiFunction],
    tol: f64,
) -> Result<EnergySweep> {
    if traj.grid().steps() == 0 {
        return Err(Error::InvalidInterval("trajectory has a single node".into()));
    }
    let profile = EnergyProfile::new(traj, viscosity, forcing)?;
    let linear = profile.ledger(PsiFunction::Linear);
    let n = linear.len();
    let pairs = || (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)));
    let energy = linear.sweep(ENERGY_TAG, tol).expect("at least one pair");
    let strengthened = psis
        .iter()
        .map(|&p| (p, profile.ledger(p).sweep(STRENGTHENED_TAG, tol).expect("at least one pair")))
        .collect();
    let apriori = SweepSummary::collect(
        APRIORI_TAG,
        pairs().map(|(i, j)| apriori_row(&profile, &linear, forcing, lambda1, i, j, tol)),
    )
    .expect("at least one pair");
    let decay = SweepSummary::collect(DECAY_TAG, pairs().map(|(i, j)| decay_row(&profile, forcing, lambda1, i, j, tol)))
        .expect("at least one pair");
    Ok(EnergySweep {
        energy,
        strengthened,
        apriori,
        decay,
    })
}
