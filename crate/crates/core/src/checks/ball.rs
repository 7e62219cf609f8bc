use serde::{Deserialize, Serialize};

use crate::dynamics::{ForcingSignal, Trajectory};
use crate::error::{Error, Result};

/// Radius `||f||_inf / (nu lambda1)` of the absorbing ball.
pub fn compute_r0(forcing: &ForcingSignal, viscosity: f64, lambda1: f64) -> f64 {
    forcing.ess_sup_norm() / (viscosity * lambda1)
}

/// Result of checking that a trajectory stays in the closed ball of radius `R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallReport {
    pub radius: f64,
    pub r0: f64,
    pub tol: f64,
    pub max_norm: f64,
    pub passed: bool,
    /// `(t, |u(t)|)` at the first node outside `R (1 + tol)`.
    pub first_violation: Option<(f64, f64)>,
}

/// Checks `|u(t)| <= R (1 + tol)` at every node. `R` below `R0` and an
/// initial state outside the ball are usage errors, since the property is
/// only claimed under those hypotheses.
pub fn ball_invariance(
    traj: &Trajectory,
    forcing: &ForcingSignal,
    viscosity: f64,
    lambda1: f64,
    radius: f64,
    tol: f64,
) -> Result<BallReport> {
    let r0 = compute_r0(forcing, viscosity, lambda1);
    if radius < r0 * (1.0 - 1e-12) {
        return Err(Error::Misuse(format!(
            "ball invariance is only asserted for R >= R0; got R={radius} < R0={r0}"
        )));
    }
    let bound = radius * (1.0 + tol);
    let u0 = traj.initial().norm();
    if u0 > bound {
        return Err(Error::Misuse(format!("initial state |u(t0)|={u0} lies outside the ball of radius {radius}")));
    }
    let times = traj.grid().nodes();
    let mut max_norm = 0.0f64;
    let mut first_violation = None;
    for (t, u) in times.iter().zip(traj.states()) {
        let n = u.norm();
        max_norm = max_norm.max(n);
        if n > bound && first_violation.is_none() {
            first_violation = Some((*t, n));
        }
    }
    Ok(BallReport {
        radius,
        r0,
        tol,
        max_norm,
        passed: first_violation.is_none(),
        first_violation,
    })
}
