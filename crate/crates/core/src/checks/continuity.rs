//! Right-continuity diagnostics at the initial time, from the averaged
//! energy excess `Psi(u, t) = (t - t0)^{-1} int_{t0}^t (|u(s)|^2 - |u(t0)|^2) ds`.

use serde::{Deserialize, Serialize};

use crate::dynamics::{TimeGrid, Trajectory};
use crate::error::{Error, Result};

/// Running trapezoid integrals of `|u|^2 - |u(t0)|^2`, so that `Psi` at any
/// node costs O(1).
#[derive(Debug, Clone)]
pub struct PsiSeries {
    t0: f64,
    times: Vec<f64>,
    cumulative: Vec<f64>,
}

impl PsiSeries {
    pub fn new(traj: &Trajectory) -> Self {
        Self::from_energies(traj.grid(), &traj.energies())
    }

    pub fn from_energies(grid: &TimeGrid, energies: &[f64]) -> Self {
        let e0 = energies[0];
        let half_dt = 0.5 * grid.dt();
        let mut cumulative = Vec::with_capacity(energies.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in energies.windows(2) {
            acc += half_dt * ((w[0] - e0) + (w[1] - e0));
            cumulative.push(acc);
        }
        PsiSeries {
            t0: grid.t0(),
            times: grid.nodes(),
            cumulative,
        }
    }

    pub fn at_index(&self, i: usize) -> Result<f64> {
        if i == 0 || i >= self.times.len() {
            return Err(Error::InvalidInterval(format!("Psi needs a node index in 1..{}, got {i}", self.times.len())));
        }
        Ok(self.cumulative[i] / (self.times[i] - self.t0))
    }
}

/// `Psi(u, t)` for a grid node `t > t0`.
pub fn psi_functional(traj: &Trajectory, t: f64) -> Result<f64> {
    let i = traj.index_of(t)?;
    if i == 0 {
        return Err(Error::InvalidInterval(format!("Psi is defined for t > t0, got t={t}")));
    }
    PsiSeries::new(traj).at_index(i)
}

/// Sample times `t0 + tau / 2^j`, `j = 0..count`, decreasing, all on the grid.
pub fn dyadic_times(grid: &TimeGrid, tau: f64, count: usize) -> Result<Vec<f64>> {
    if !(tau > 0.0) || grid.t0() + tau > grid.t1() + 1e-12 * grid.t1().abs().max(1.0) {
        return Err(Error::InvalidInterval(format!("tau={tau} must lie in (0, {}]", grid.t1() - grid.t0())));
    }
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let t = grid.t0() + tau / f64::powi(2.0, j as i32);
        let i = grid.index_of(t)?;
        out.push(grid.node(i));
    }
    Ok(out)
}

/// Samples `Psi(t_n)` for `t_n` decreasing to `t0`, with an extrapolated limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub min: f64,
    /// `d Psi / dt` at `t0` from the fit.
    pub slope: f64,
    /// Fitted value of the trapezoid `Psi` at `t = t0`; carries a
    /// `dt^2 e''(t0) / 12` quadrature bias on smooth trajectories.
    pub raw_limit: f64,
    /// Limit used for the verdict: the step-doubling combination
    /// `(4 L(dt) - L(2 dt)) / 3` when at least three samples sit on even
    /// nodes, otherwise `raw_limit`.
    pub limit: f64,
    pub tol: f64,
    /// `|limit| <= tol`.
    pub consistent: bool,
}

/// Fits a polynomial in `tau = t - t0` through the samples and reads off
/// the value and slope at `tau = 0`. Up to six samples are interpolated
/// exactly (Neville-style extrapolation, well conditioned on dyadic
/// offsets); beyond that a quintic least-squares fit is used.
///
/// On trapezoid-averaged data such as `Psi` the limit carries the
/// quadrature bias `dt^2 e''(t0) / 12` of the underlying energy curve.
pub fn extrapolate_to_zero(taus: &[f64], values: &[f64]) -> Result<(f64, f64)> {
    let n = taus.len();
    if n < 3 || values.len() != n {
        return Err(Error::invalid(format!("need at least 3 samples to extrapolate, got {n}")));
    }
    let degree = (n - 1).min(5);
    let scale = taus.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    if !(scale > 0.0) {
        return Err(Error::invalid("sample offsets must be positive"));
    }
    let p = degree + 1;
    let mut normal = vec![vec![0.0; p + 1]; p];
    for (t, y) in taus.iter().zip(values) {
        let x = t / scale;
        let powers: Vec<f64> = (0..p).map(|k| x.powi(k as i32)).collect();
        for r in 0..p {
            for c in 0..p {
                normal[r][c] += powers[r] * powers[c];
            }
            normal[r][p] += powers[r] * y;
        }
    }
    let coef = solve_dense(normal)?;
    Ok((coef[0], coef[1] / scale))
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve_dense(mut m: Vec<Vec<f64>>) -> Result<Vec<f64>> {
    let p = m.len();
    for col in 0..p {
        let piv = (col..p)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .expect("nonempty");
        if m[piv][col].abs() < 1e-300 {
            return Err(Error::invalid("sample times are degenerate"));
        }
        m.swap(col, piv);
        for r in col + 1..p {
            let f = m[r][col] / m[col][col];
            for c in col..=p {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    let mut x = vec![0.0; p];
    for r in (0..p).rev() {
        let s: f64 = (r + 1..p).map(|c| m[r][c] * x[c]).sum();
        x[r] = (m[r][p] - s) / m[r][r];
    }
    Ok(x)
}

/// Evaluates `Psi` along decreasing grid times and judges right-continuity
/// of `|u|^2` at `t0` by the extrapolated limit.
pub fn strong_continuity_diagnostic(traj: &Trajectory, times: &[f64], tol: f64) -> Result<ContinuityReport> {
    if times.len() < 3 {
        return Err(Error::invalid(format!("need at least 3 sample times, got {}", times.len())));
    }
    if times.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("sample times must be strictly decreasing"));
    }
    let grid = traj.grid();
    let energies = traj.energies();
    let series = PsiSeries::from_energies(grid, &energies);
    let t0 = grid.t0();
    let idx = times.iter().map(|&t| traj.index_of(t)).collect::<Result<Vec<_>>>()?;
    let values = idx.iter().map(|&i| series.at_index(i)).collect::<Result<Vec<_>>>()?;
    let taus: Vec<f64> = times.iter().map(|t| t - t0).collect();
    let (raw_limit, slope) = extrapolate_to_zero(&taus, &values)?;

    let even: Vec<usize> = (0..idx.len()).filter(|&n| idx[n] % 2 == 0).collect();
    let limit = if even.len() >= 3 {
        let coarse = coarse_psi(&energies, grid.dt());
        let tau_e: Vec<f64> = even.iter().map(|&n| taus[n]).collect();
        let fine_e: Vec<f64> = even.iter().map(|&n| values[n]).collect();
        let coarse_e: Vec<f64> = even.iter().map(|&n| coarse[idx[n] / 2]).collect();
        let (l1, _) = extrapolate_to_zero(&tau_e, &fine_e)?;
        let (l2, _) = extrapolate_to_zero(&tau_e, &coarse_e)?;
        (4.0 * l1 - l2) / 3.0
    } else {
        raw_limit
    };
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ContinuityReport {
        times: times.to_vec(),
        values,
        min,
        slope,
        raw_limit,
        limit,
        tol,
        consistent: limit.abs() <= tol,
    })
}

/// `Psi` by trapezoid on every other node (step `2 dt`); entry `m` is at node `2m`.
fn coarse_psi(energies: &[f64], dt: f64) -> Vec<f64> {
    let e0 = energies[0];
    let h = 2.0 * dt;
    let mut out = vec![0.0];
    let mut acc = 0.0;
    let mut m = 1;
    while 2 * m < energies.len() {
        acc += 0.5 * h * ((energies[2 * m - 2] - e0) + (energies[2 * m] - e0));
        out.push(acc / (m as f64 * h));
        m += 1;
    }
    out
}
