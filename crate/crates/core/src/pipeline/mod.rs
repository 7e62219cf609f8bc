//! Ensemble construction from an initial measure and the statistical
//! checks run on the resulting trajectory measure.

mod build;
mod carrier;
mod convex;
mod liouville;
mod mean;
mod report;

pub use build::{construct_vf_measure, VFBuildConfig};
pub use carrier::{
    carrier_check, localization_check, weighted_psi_series, AtomContinuity, CarrierReport, LocalizationReport,
    LOCALIZATION_SLACK,
};
pub use convex::{convex_approx_diagnostic, resample_toward, ConvexApproxTable, ResampleStrategy};
pub use liouville::{liouville_residual, LiouvilleEvaluator, LiouvilleSeries};
pub use mean::{
    initial_continuity, mean_energy_bound, mean_energy_inequality, weak_mean_energy_inequality, EnsembleEnergy,
    InitialContinuityReport, MEAN_BOUND_TAG, MEAN_ENERGY_TAG, WEAK_MEAN_ENERGY_TAG,
};
pub use report::{ConvergencePoint, SeriesPoint, StatReport, StatRow};
