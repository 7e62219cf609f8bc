//! Integrating-factor RK4 for `du/dt + nu A u + B(u, u) = f`.
//!
//! On each step the forcing is constant, so the affine part
//! `-nu A u + f` has the exact flow
//! `u_f + exp(-nu lambda t) (u - u_f)` with `u_f = (nu A)^{-1} f`.
//! The scheme integrates the deviation `w = u - u_f` with the Lawson
//! (integrating-factor) RK4 stages, treating `-B(w + u_f, w + u_f)`
//! explicitly. With `B = 0` or a steady Stokes state the step is exact to
//! round-off.
//!
//! Stability: explicit treatment of the advection term asks for roughly
//! `dt * kappa_max * max|u| <= 0.5`; the ball-confinement checks are
//! calibrated for that regime.

use std::sync::Arc;

use super::forcing::ForcingSignal;
use super::grid::TimeGrid;
use super::trajectory::{Trajectory, TrajectoryMeta};
use crate::error::{Error, Result};
use crate::spectral::{Coeff, Nonlinear, NonlinearScheme, VelocityField, WaveLattice};

pub const SOLVER_ID: &str = "ifrk4";

/// Galerkin ODE on one lattice with fixed viscosity.
#[derive(Debug)]
pub struct GalerkinSystem {
    lattice: Arc<WaveLattice>,
    viscosity: f64,
    nonlinear: Nonlinear,
}

impl GalerkinSystem {
    pub fn new(lattice: &Arc<WaveLattice>, viscosity: f64, scheme: NonlinearScheme) -> Result<Self> {
        if !(viscosity.is_finite() && viscosity > 0.0) {
            return Err(Error::invalid(format!("viscosity must be positive, got {viscosity}")));
        }
        Ok(GalerkinSystem {
            lattice: lattice.clone(),
            viscosity,
            nonlinear: Nonlinear::new(lattice, scheme),
        })
    }

    pub fn lattice(&self) -> &Arc<WaveLattice> {
        &self.lattice
    }

    pub fn viscosity(&self) -> f64 {
        self.viscosity
    }

    pub fn nonlinear(&self) -> &Nonlinear {
        &self.nonlinear
    }

    /// Right-hand side `F(u) = f - nu A u - B(u, u)`.
    pub fn rhs(&self, u: &VelocityField, f: &VelocityField) -> Result<VelocityField> {
        let b = self.nonlinear.apply(u, u)?;
        let nu = self.viscosity;
        let coeffs = u
            .coeffs()
            .iter()
            .zip(f.coeffs())
            .zip(b.coeffs())
            .zip(self.lattice.eigenvalues())
            .map(|(((c, fc), bc), lam)| [0, 1, 2].map(|i| fc[i] - c[i] * (nu * lam) - bc[i]))
            .collect();
        Ok(VelocityField::from_coeffs_unchecked(&self.lattice, coeffs))
    }

    /// `-B(w + shift, w + shift)` as raw coefficients.
    fn stage(&self, w: &[Coeff], shift: &[Coeff]) -> Result<Vec<Coeff>> {
        let u: Vec<Coeff> = w
            .iter()
            .zip(shift)
            .map(|(a, b)| [0, 1, 2].map(|i| a[i] + b[i]))
            .collect();
        let u = VelocityField::from_coeffs_unchecked(&self.lattice, u);
        let b = self.nonlinear.apply(&u, &u)?;
        Ok(b.coeffs().iter().map(|c| c.map(|z| -z)).collect())
    }

    fn step(&self, u: &VelocityField, f: &VelocityField, dt: f64) -> Result<VelocityField> {
        let nu = self.viscosity;
        let lam = self.lattice.eigenvalues();
        // steady Stokes state for this step's forcing
        let shift: Vec<Coeff> = f
            .coeffs()
            .iter()
            .zip(lam)
            .map(|(c, l)| c.map(|z| z / (nu * l)))
            .collect();
        let half: Vec<f64> = lam.iter().map(|l| (-nu * l * 0.5 * dt).exp()).collect();
        let w: Vec<Coeff> = u
            .coeffs()
            .iter()
            .zip(&shift)
            .map(|(a, b)| [0, 1, 2].map(|i| a[i] - b[i]))
            .collect();
        let n = w.len();
        let combine = |f: &dyn Fn(usize, usize) -> num_complex::Complex64| -> Vec<Coeff> {
            (0..n).map(|m| [0, 1, 2].map(|i| f(m, i))).collect()
        };

        let k1 = self.stage(&w, &shift)?;
        let a = combine(&|m, i| half[m] * (w[m][i] + k1[m][i] * (0.5 * dt)));
        let k2 = self.stage(&a, &shift)?;
        let b = combine(&|m, i| half[m] * w[m][i] + k2[m][i] * (0.5 * dt));
        let k3 = self.stage(&b, &shift)?;
        let c = combine(&|m, i| half[m] * (half[m] * w[m][i] + k3[m][i] * dt));
        let k4 = self.stage(&c, &shift)?;
        let next = combine(&|m, i| {
            let e = half[m];
            let e2 = e * e;
            e2 * w[m][i]
                + (k1[m][i] * e2 + (k2[m][i] + k3[m][i]) * (2.0 * e) + k4[m][i]) * (dt / 6.0)
                + shift[m][i]
        });
        Ok(VelocityField::from_coeffs_unchecked(&self.lattice, next))
    }

    /// Integrates from `u0` at `grid.t0()` storing every node.
    pub fn integrate(&self, u0: &VelocityField, grid: &TimeGrid, forcing: &ForcingSignal) -> Result<Trajectory> {
        u0.check_lattice(&VelocityField::zeros(&self.lattice))?;
        if !forcing.covers(grid.t0(), grid.t1()) {
            return Err(Error::Forcing(format!(
                "forcing defined on [{}, {}] does not cover [{}, {}]",
                forcing.interval().start,
                forcing.interval().end,
                grid.t0(),
                grid.t1()
            )));
        }
        if !u0.is_finite() {
            return Err(Error::Integration {
                t: grid.t0(),
                reason: "non-finite initial state".into(),
                atom: None,
            });
        }
        let dt = grid.dt();
        let mut states = Vec::with_capacity(grid.len());
        states.push(u0.clone());
        for i in 0..grid.steps() {
            let (a, b) = (grid.node(i), grid.node(i + 1));
            let f = forcing.on_step(a, b);
            let next = self.step(&states[i], f, dt)?;
            if !next.is_finite() {
                return Err(Error::Integration {
                    t: b,
                    reason: "non-finite state (discretization blow-up)".into(),
                    atom: None,
                });
            }
            states.push(next);
        }
        Trajectory::new(
            *grid,
            states,
            TrajectoryMeta {
                solver: SOLVER_ID.into(),
                viscosity: self.viscosity,
                synthetic: false,
            },
        )
    }
}

/// One-shot integration with the default convolution kernel.
pub fn integrate(u0: &VelocityField, grid: &TimeGrid, nu: f64, forcing: &ForcingSignal) -> Result<Trajectory> {
    GalerkinSystem::new(u0.lattice(), nu, NonlinearScheme::Convolution)?.integrate(u0, grid, forcing)
}
