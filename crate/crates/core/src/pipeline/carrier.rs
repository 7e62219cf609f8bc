use serde::{Deserialize, Serialize};

use crate::checks::{strong_continuity_diagnostic, PsiSeries};
use crate::dynamics::ForcingSignal;
use crate::error::{Error, Result};
use crate::measure::{ordered_sum, TrajectoryMeasure};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomContinuity {
    pub atom: usize,
    pub synthetic: bool,
    pub limit: f64,
    pub min: f64,
    pub consistent: bool,
}

/// Strong right-continuity at `t0` across an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarrierReport {
    pub times: Vec<f64>,
    /// `sum_j theta_j Psi(u_j, t_n)`.
    pub weighted_psi: Vec<f64>,
    /// `(t_n - t0) ||f||^2_inf / (2 nu lambda1)`.
    pub bounds: Vec<f64>,
    pub bound_tol: f64,
    pub bound_passed: bool,
    pub atoms: Vec<AtomContinuity>,
    pub tol: f64,
    /// Every atom consistent with a vanishing Ψ-limit.
    pub consistent: bool,
}

pub fn carrier_check(
    rho: &TrajectoryMeasure,
    times: &[f64],
    viscosity: f64,
    forcing: &ForcingSignal,
    tol: f64,
    bound_tol: f64,
) -> Result<CarrierReport> {
    let grid = rho.grid();
    let t0 = grid.t0();
    let lambda1 = rho.lattice().lambda1();
    let mut atoms = Vec::with_capacity(rho.len());
    let mut per_atom = Vec::with_capacity(rho.len());
    for (j, traj) in rho.atoms().iter().enumerate() {
        let d = strong_continuity_diagnostic(traj, times, tol)?;
        atoms.push(AtomContinuity {
            atom: j,
            synthetic: traj.meta().synthetic,
            limit: d.limit,
            min: d.min,
            consistent: d.consistent,
        });
        per_atom.push(d.values);
    }
    let weighted_psi: Vec<f64> = (0..times.len())
        .map(|n| ordered_sum(rho.weights(), per_atom.iter().map(|v| v[n])))
        .collect();
    let fsup = forcing.ess_sup_norm();
    let bounds: Vec<f64> = times
        .iter()
        .map(|t| (t - t0) * fsup * fsup / (2.0 * viscosity * lambda1))
        .collect();
    let bound_passed = weighted_psi.iter().zip(&bounds).all(|(p, b)| *p <= b + bound_tol);
    Ok(CarrierReport {
        times: times.to_vec(),
        weighted_psi,
        bounds,
        bound_tol,
        bound_passed,
        consistent: atoms.iter().all(|a| a.consistent),
        atoms,
        tol,
    })
}

/// ρ-weighted `Psi` at every node after `t0`; index 0 is left at 0.
pub fn weighted_psi_series(rho: &TrajectoryMeasure) -> Result<Vec<f64>> {
    let series: Vec<PsiSeries> = rho.atoms().iter().map(PsiSeries::new).collect();
    let n = rho.grid().len();
    let mut out = vec![0.0; n];
    for (i, slot) in out.iter_mut().enumerate().skip(1) {
        let vals = series.iter().map(|s| s.at_index(i)).collect::<Result<Vec<_>>>()?;
        *slot = ordered_sum(rho.weights(), vals.into_iter());
    }
    Ok(out)
}

/// Slack on the ball radius in localization checks.
pub const LOCALIZATION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub radius: f64,
    pub sampled_nodes: usize,
    pub on_samples: bool,
    pub on_all_nodes: bool,
    /// First `(atom, t, |u(t)|)` outside the ball among the samples.
    pub violation: Option<(usize, f64, f64)>,
}

impl LocalizationReport {
    pub fn agree(&self) -> bool {
        self.on_samples == self.on_all_nodes
    }
}

/// Is every marginal `rho_t`, `t` in `samples`, carried by the ball of radius `R`?
/// The same question is answered on all nodes for comparison.
pub fn localization_check(rho: &TrajectoryMeasure, radius: f64, samples: &[f64]) -> Result<LocalizationReport> {
    if samples.is_empty() {
        return Err(Error::invalid("localization needs at least one sample time"));
    }
    let bound = radius * (1.0 + LOCALIZATION_SLACK);
    let grid = rho.grid();
    let idx = samples.iter().map(|&t| grid.index_of(t)).collect::<Result<Vec<_>>>()?;
    let mut violation = None;
    'outer: for &i in &idx {
        for (j, a) in rho.atoms().iter().enumerate() {
            let n = a.states()[i].norm();
            if n > bound {
                violation = Some((j, grid.node(i), n));
                break 'outer;
            }
        }
    }
    let on_all_nodes = rho.atoms().iter().all(|a| a.states().iter().all(|u| u.norm() <= bound));
    Ok(LocalizationReport {
        radius,
        sampled_nodes: idx.len(),
        on_samples: violation.is_none(),
        on_all_nodes,
        violation,
    })
}
