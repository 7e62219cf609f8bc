//! Checks on individual trajectories: energy inequalities and their
//! consequences, absorbing-ball invariance and right-continuity at `t0`.

mod ball;
mod continuity;
mod energy;
mod psi;
mod report;

pub use ball::{ball_invariance, compute_r0, BallReport};
pub use continuity::{
    dyadic_times, extrapolate_to_zero, psi_functional, strong_continuity_diagnostic, ContinuityReport, PsiSeries,
};
pub use energy::{
    apriori_bound, decay_envelope, energy_inequality, strengthened_energy_inequality, sweep_energy_checks,
    EnergyLedger, EnergyProfile, EnergySweep, APRIORI_TAG, DECAY_TAG, ENERGY_TAG, STRENGTHENED_TAG,
};
pub use psi::PsiFunction;
pub use report::{InequalityReport, RichardsonCalibration, SweepSummary, DEFAULT_SAFETY};
