use serde::{Deserialize, Serialize};

use crate::checks::{extrapolate_to_zero, EnergyLedger, EnergyProfile, InequalityReport, PsiFunction, SweepSummary};
use crate::dynamics::ForcingSignal;
use crate::error::{Error, Result};
use crate::measure::{ordered_sum, TrajectoryMeasure};

pub const MEAN_ENERGY_TAG: &str = "mean_energy_inequality";
pub const WEAK_MEAN_ENERGY_TAG: &str = "weak_mean_energy_inequality";
pub const MEAN_BOUND_TAG: &str = "mean_energy_bound";

/// Per-atom energy data of an ensemble, reused across ψ choices.
pub struct EnsembleEnergy<'a> {
    rho: &'a TrajectoryMeasure,
    profiles: Vec<EnergyProfile>,
}

impl<'a> EnsembleEnergy<'a> {
    pub fn new(rho: &'a TrajectoryMeasure, viscosity: f64, forcing: &ForcingSignal) -> Result<Self> {
        let profiles = rho
            .atoms()
            .iter()
            .map(|a| EnergyProfile::new(a, viscosity, forcing))
            .collect::<Result<Vec<_>>>()?;
        Ok(EnsembleEnergy { rho, profiles })
    }

    pub fn profiles(&self) -> &[EnergyProfile] {
        &self.profiles
    }

    /// ρ-weighted ledger; trapezoid in time inside each atom, then the
    /// weighted sum in atom order.
    pub fn ledger(&self, psi: PsiFunction) -> EnergyLedger {
        let ledgers: Vec<EnergyLedger> = self.profiles.iter().map(|p| p.ledger(psi)).collect();
        let parts: Vec<(f64, &EnergyLedger)> = self.rho.weights().iter().copied().zip(ledgers.iter()).collect();
        EnergyLedger::combine(&parts).expect("ensemble is nonempty and on one grid")
    }

    /// `int |u(t_i)|^2 d rho` for every node.
    pub fn mean_energies(&self) -> Vec<f64> {
        let n = self.rho.grid().len();
        (0..n)
            .map(|i| ordered_sum(self.rho.weights(), self.profiles.iter().map(|p| p.energies()[i])))
            .collect()
    }

    pub fn mean_enstrophies(&self) -> Vec<f64> {
        let n = self.rho.grid().len();
        (0..n)
            .map(|i| ordered_sum(self.rho.weights(), self.profiles.iter().map(|p| p.enstrophies()[i])))
            .collect()
    }

    pub fn sweep(&self, psi: PsiFunction, tol: f64) -> SweepSummary {
        let tag = if psi == PsiFunction::Linear { WEAK_MEAN_ENERGY_TAG } else { MEAN_ENERGY_TAG };
        self.ledger(psi).sweep(tag, tol).expect("at least two nodes")
    }
}

fn node_pair(rho: &TrajectoryMeasure, t_prime: f64, t: f64) -> Result<(usize, usize)> {
    let (i, j) = (rho.grid().index_of(t_prime)?, rho.grid().index_of(t)?);
    if i >= j {
        return Err(Error::InvalidInterval(format!("need t' < t, got t'={t_prime}, t={t}")));
    }
    Ok((i, j))
}

/// Strengthened mean energy inequality between two grid nodes.
pub fn mean_energy_inequality(
    rho: &TrajectoryMeasure,
    psi: PsiFunction,
    t_prime: f64,
    t: f64,
    viscosity: f64,
    forcing: &ForcingSignal,
    tol: f64,
) -> Result<InequalityReport> {
    let (i, j) = node_pair(rho, t_prime, t)?;
    Ok(EnsembleEnergy::new(rho, viscosity, forcing)?.ledger(psi).report(MEAN_ENERGY_TAG, i, j, tol))
}

/// The weaker mean inequality with `psi(r) = r`, reported under its own tag.
pub fn weak_mean_energy_inequality(
    rho: &TrajectoryMeasure,
    t_prime: f64,
    t: f64,
    viscosity: f64,
    forcing: &ForcingSignal,
    tol: f64,
) -> Result<InequalityReport> {
    let (i, j) = node_pair(rho, t_prime, t)?;
    Ok(EnsembleEnergy::new(rho, viscosity, forcing)?
        .ledger(PsiFunction::Linear)
        .report(WEAK_MEAN_ENERGY_TAG, i, j, tol))
}

/// `int |u(t)|^2 d rho <= int |u(t0)|^2 d rho + ||f||^2_inf (t - t0) / (nu lambda1)` at every node.
pub fn mean_energy_bound(
    rho: &TrajectoryMeasure,
    viscosity: f64,
    lambda1: f64,
    forcing: &ForcingSignal,
    tol: f64,
) -> Result<Vec<InequalityReport>> {
    let ens = EnsembleEnergy::new(rho, viscosity, forcing)?;
    let e = ens.mean_energies();
    let times = rho.grid().nodes();
    let fsup = forcing.ess_sup_norm();
    let slope = fsup * fsup / (viscosity * lambda1);
    Ok(times
        .iter()
        .zip(&e)
        .map(|(&t, &lhs)| InequalityReport::new(MEAN_BOUND_TAG, times[0], t, lhs, e[0] + slope * (t - times[0]), tol))
        .collect())
}

/// Right-continuity of `t -> int psi(|u(t)|^2) d rho` at the initial time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialContinuityReport {
    pub psi: PsiFunction,
    pub times: Vec<f64>,
    /// `|int psi(|u(t_n)|^2) d rho - int psi(|u(t0)|^2) d rho|`.
    pub gaps: Vec<f64>,
    /// Extrapolated signed gap at `t0`.
    pub limit: f64,
    pub tol: f64,
    pub consistent: bool,
}

/// Samples the mean ψ-energy at `t0 + delta / 2^j` down to one step and
/// extrapolates the gap to `t0`. `delta` must span at least 4 steps.
pub fn initial_continuity(rho: &TrajectoryMeasure, psi: PsiFunction, delta: f64, tol: f64) -> Result<InitialContinuityReport> {
    let grid = rho.grid();
    let steps = delta / grid.dt();
    if !(steps >= 4.0 - 1e-9) {
        return Err(Error::InvalidInterval(format!("horizon {delta} spans fewer than 4 steps of {}", grid.dt())));
    }
    let count = (steps + 1e-9).log2().floor() as usize + 1;
    let times = crate::checks::dyadic_times(grid, delta, count)?;
    let mean_psi = |i: usize| ordered_sum(rho.weights(), rho.atoms().iter().map(|a| psi.value(a.states()[i].energy())));
    let base = mean_psi(0);
    let signed: Vec<f64> = times
        .iter()
        .map(|&t| grid.index_of(t).map(|i| mean_psi(i) - base))
        .collect::<Result<_>>()?;
    let taus: Vec<f64> = times.iter().map(|t| t - grid.t0()).collect();
    let (limit, _) = extrapolate_to_zero(&taus, &signed)?;
    Ok(InitialContinuityReport {
        psi,
        times,
        gaps: signed.iter().map(|g| g.abs()).collect(),
        limit,
        tol,
        consistent: limit.abs() <= tol,
    })
}
