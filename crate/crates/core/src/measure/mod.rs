//! Atomic probability measures on phase space and on trajectory space,
//! cylindrical test functions and weak-star diagnostics.

mod annuli;
mod cylindrical;
mod family;
mod measures;

pub use annuli::{annuli_split, mixture_expectation, recombine, AnnulusPart, RadiiLadder};
pub use cylindrical::{
    cyl_eval, cyl_grad, expect_cyl, random_cylindrical_family, random_unit_field, weak_star_gap, weak_star_gaps,
    CylindricalTestFunction, QuadraticProfile,
};
pub use family::{psi_family, PsiKind};
pub use measures::{
    expect, galerkin_pushforward, make_phase_measure, make_trajectory_measure, mean_energy, mean_enstrophy,
    project_at, PhaseMeasure, TrajectoryMeasure, WEIGHT_SUM_TOL,
};
pub(crate) use measures::ordered_sum;
