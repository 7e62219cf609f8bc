use crate::dynamics::ForcingSignal;
use crate::error::{Error, Result};
use crate::measure::{CylindricalTestFunction, TrajectoryMeasure};
use crate::spectral::{l2_inner_unchecked, stokes_apply, Nonlinear, NonlinearScheme, VelocityField};

/// Evaluates the Liouville equation
/// `int Phi d rho_t - int Phi d rho_t' = int_t'^t int <F(u), Phi'(u)> d rho_s ds`
/// for cylindrical test functions, with `F(u) = f - nu A u - B(u, u)`.
///
/// `nu A u + B(u, u)` is computed once per atom and node; each test
/// function then costs only inner products.
pub struct LiouvilleEvaluator<'a> {
    rho: &'a TrajectoryMeasure,
    forcing: &'a ForcingSignal,
    drift: Vec<Vec<VelocityField>>,
}

/// Running sums for one test function.
#[derive(Debug, Clone)]
pub struct LiouvilleSeries {
    pub times: Vec<f64>,
    /// `int Phi d rho_{t_i}`.
    pub expectation: Vec<f64>,
    /// `int_{t0}^{t_i} int <F, Phi'> d rho ds` by trapezoid.
    pub flux: Vec<f64>,
}

impl LiouvilleSeries {
    pub fn residual(&self, i: usize, j: usize) -> f64 {
        ((self.expectation[j] - self.expectation[i]) - (self.flux[j] - self.flux[i])).abs()
    }

    /// Largest residual over node pairs drawn from `nodes`.
    pub fn max_residual_on(&self, nodes: &[usize]) -> f64 {
        let mut m = 0.0f64;
        for (a, &i) in nodes.iter().enumerate() {
            for &j in &nodes[a + 1..] {
                m = m.max(self.residual(i, j));
            }
        }
        m
    }

    pub fn max_residual(&self) -> f64 {
        let all: Vec<usize> = (0..self.times.len()).collect();
        self.max_residual_on(&all)
    }
}

impl<'a> LiouvilleEvaluator<'a> {
    pub fn new(
        rho: &'a TrajectoryMeasure,
        viscosity: f64,
        forcing: &'a ForcingSignal,
        scheme: NonlinearScheme,
    ) -> Result<Self> {
        if !forcing.lattice().same_as(rho.lattice()) {
            return Err(Error::LatticeMismatch);
        }
        let grid = rho.grid();
        if !forcing.covers(grid.t0(), grid.t1()) {
            return Err(Error::Forcing("forcing does not cover the ensemble's grid".into()));
        }
        let nl = Nonlinear::new(rho.lattice(), scheme);
        let mut drift = Vec::with_capacity(rho.len());
        for traj in rho.atoms() {
            let mut per_node = Vec::with_capacity(traj.states().len());
            for u in traj.states() {
                let b = nl.apply(u, u)?;
                per_node.push(b.add_scaled(viscosity, &stokes_apply(u))?);
            }
            drift.push(per_node);
        }
        Ok(LiouvilleEvaluator { rho, forcing, drift })
    }

    pub fn series(&self, phi: &CylindricalTestFunction) -> Result<LiouvilleSeries> {
        let times = self.rho.grid().nodes();
        let n = times.len();
        let weights = self.rho.weights();
        let mut expectation = vec![0.0; n];
        // Integrand without the forcing part, and the gradients for (f, Phi').
        let mut pairing_left = vec![0.0; n.saturating_sub(1)];
        let mut pairing_right = vec![0.0; n.saturating_sub(1)];
        let step_forcing: Vec<&VelocityField> = (0..n - 1).map(|s| self.forcing.on_step(times[s], times[s + 1])).collect();
        for (a, traj) in self.rho.atoms().iter().enumerate() {
            let w = weights[a];
            for (i, u) in traj.states().iter().enumerate() {
                expectation[i] += w * phi.eval(u)?;
                let g = phi.grad(u)?;
                let drift = -l2_inner_unchecked(&self.drift[a][i], &g);
                if i + 1 < n {
                    pairing_left[i] += w * (drift + l2_inner_unchecked(step_forcing[i], &g));
                }
                if i > 0 {
                    pairing_right[i - 1] += w * (drift + l2_inner_unchecked(step_forcing[i - 1], &g));
                }
            }
        }
        let half_dt = 0.5 * self.rho.grid().dt();
        let mut flux = Vec::with_capacity(n);
        let mut acc = 0.0;
        flux.push(0.0);
        for s in 0..n - 1 {
            acc += half_dt * (pairing_left[s] + pairing_right[s]);
            flux.push(acc);
        }
        Ok(LiouvilleSeries {
            times,
            expectation,
            flux,
        })
    }
}

/// Absolute Liouville residual between two grid nodes.
pub fn liouville_residual(
    rho: &TrajectoryMeasure,
    phi: &CylindricalTestFunction,
    t_prime: f64,
    t: f64,
    viscosity: f64,
    forcing: &ForcingSignal,
) -> Result<f64> {
    let grid = rho.grid();
    let (i, j) = (grid.index_of(t_prime)?, grid.index_of(t)?);
    if i >= j {
        return Err(Error::InvalidInterval(format!("need t' < t, got t'={t_prime}, t={t}")));
    }
    let eval = LiouvilleEvaluator::new(rho, viscosity, forcing, NonlinearScheme::default())?;
    Ok(eval.series(phi)?.residual(i, j))
}
