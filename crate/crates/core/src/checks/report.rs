use serde::{Deserialize, Serialize};

/// Both sides of a checked inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub check: String,
    pub t_prime: f64,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub defect: f64,
    pub tol: f64,
    pub passed: bool,
}

impl InequalityReport {
    pub fn new(check: &str, t_prime: f64, t: f64, lhs: f64, rhs: f64, tol: f64) -> Self {
        let defect = rhs - lhs;
        InequalityReport {
            check: check.to_string(),
            t_prime,
            t,
            lhs,
            rhs,
            defect,
            tol,
            passed: defect >= -tol,
        }
    }
}

/// Outcome of sweeping a check over many `(t', t)` node pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub check: String,
    pub pairs: usize,
    pub failures: usize,
    /// Row with the smallest defect.
    pub worst: InequalityReport,
    /// Largest `|defect|` seen.
    pub max_abs_defect: f64,
}

impl SweepSummary {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub(crate) fn collect(check: &str, rows: impl Iterator<Item = InequalityReport>) -> Option<Self> {
        let mut pairs = 0;
        let mut failures = 0;
        let mut worst: Option<InequalityReport> = None;
        let mut max_abs_defect = 0.0f64;
        for r in rows {
            pairs += 1;
            if !r.passed {
                failures += 1;
            }
            max_abs_defect = max_abs_defect.max(r.defect.abs());
            if worst.as_ref().is_none_or(|w| r.defect < w.defect) {
                worst = Some(r);
            }
        }
        worst.map(|worst| SweepSummary {
            check: check.to_string(),
            pairs,
            failures,
            worst,
            max_abs_defect,
        })
    }
}

/// Slack for a second-order discretization defect, from a step-halving pair.
///
/// With `d(dt) ~ C dt^2`, the constant is estimated as
/// `C = max |d(dt) - d(dt/2)| / (0.75 dt^2)` over common node pairs and the
/// tolerance is `safety * C * dt^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RichardsonCalibration {
    pub dt: f64,
    pub constant: f64,
    pub safety: f64,
}

pub const DEFAULT_SAFETY: f64 = 10.0;

/// Floor on the calibrated tolerance, relative to the size of the compared quantities.
const ROUNDOFF_FLOOR: f64 = 1e-13;

impl RichardsonCalibration {
    /// `coarse[i]` and `fine[i]` are the same defect evaluated at step `dt`
    /// and `dt / 2`; `scale` bounds the magnitude of the compared sides.
    pub fn from_pairs(dt: f64, coarse: &[f64], fine: &[f64], scale: f64) -> Self {
        let diff = coarse
            .iter()
            .zip(fine)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let floor = ROUNDOFF_FLOOR * scale / (dt * dt);
        RichardsonCalibration {
            dt,
            constant: (diff / (0.75 * dt * dt)).max(floor),
            safety: DEFAULT_SAFETY,
        }
    }

    pub fn tol(&self) -> f64 {
        self.safety * self.constant * self.dt * self.dt
    }

    /// Tolerance for the same scheme at a different step.
    pub fn tol_at(&self, dt: f64) -> f64 {
        self.safety * self.constant * dt * dt
    }
}
