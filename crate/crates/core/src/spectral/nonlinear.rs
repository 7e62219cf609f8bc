//! The bilinear term `B(u, v) = P_LH (u . grad) v` and the trilinear form
//! `b(u, v, w) = (B(u, v), w)`.
//!
//! The default path is a direct convolution over the truncated lattice,
//! `[(u . grad) v](k) = sum_{p + q = k} (c_u(p) . i kappa(q)) c_v(q)`,
//! evaluated only at retained representatives. A dealiased pseudospectral
//! path (grid of `n >= 3K + 1` points per axis, so no quadratic product
//! aliases back into `|k_i| <= K`) is available and agrees with the
//! convolution to round-off.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::field::{Coeff, VelocityField, ZERO};
use super::lattice::{dense_index, WaveLattice};
use super::ops::{l2_inner_unchecked, leray_in_place};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearScheme {
    #[default]
    Convolution,
    Pseudospectral,
}

/// Reusable evaluator for `B` on one lattice.
pub struct Nonlinear {
    lattice: Arc<WaveLattice>,
    kappa_axis: [Vec<f64>; 3],
    pseudo: Option<Pseudospectral>,
}

impl std::fmt::Debug for Nonlinear {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Nonlinear")
            .field("cutoff", &self.lattice.cutoff())
            .field("pseudospectral", &self.pseudo.is_some())
            .finish()
    }
}

impl Nonlinear {
    pub fn new(lattice: &Arc<WaveLattice>, scheme: NonlinearScheme) -> Self {
        let cut = lattice.cutoff() as i32;
        let lengths = lattice.params().lengths;
        let kappa_axis = [0, 1, 2].map(|i| {
            (-cut..=cut)
                .map(|q| 2.0 * PI * q as f64 / lengths[i])
                .collect::<Vec<_>>()
        });
        let pseudo = match scheme {
            NonlinearScheme::Convolution => None,
            NonlinearScheme::Pseudospectral => Some(Pseudospectral::new(lattice)),
        };
        Nonlinear {
            lattice: lattice.clone(),
            kappa_axis,
            pseudo,
        }
    }

    pub fn scheme(&self) -> NonlinearScheme {
        if self.pseudo.is_some() {
            NonlinearScheme::Pseudospectral
        } else {
            NonlinearScheme::Convolution
        }
    }

    pub fn lattice(&self) -> &Arc<WaveLattice> {
        &self.lattice
    }

    /// `B(u, v)`: Leray projection of the truncated advection term.
    pub fn apply(&self, u: &VelocityField, v: &VelocityField) -> Result<VelocityField> {
        u.check_lattice(v)?;
        let lattice_ok = VelocityField::zeros(&self.lattice);
        u.check_lattice(&lattice_ok)?;
        let mut coeffs = match &self.pseudo {
            None => self.advect_convolution(u, v),
            Some(ps) => ps.advect(&self.lattice, u, v),
        };
        leray_in_place(
            &mut coeffs,
            self.lattice.wavenumbers(),
            self.lattice.eigenvalues(),
        );
        Ok(VelocityField::from_coeffs_unchecked(&self.lattice, coeffs))
    }

    /// Truncated, unprojected `(u . grad) v` by direct convolution.
    fn advect_convolution(&self, u: &VelocityField, v: &VelocityField) -> Vec<Coeff> {
        let cut = self.lattice.cutoff();
        let c = cut as i32;
        let side = self.lattice.dense_side();
        let du = expand_dense(u);
        let dv = expand_dense(v);
        let [kx_t, ky_t, kz_t] = &self.kappa_axis;
        let mut out = vec![ZERO; self.lattice.len()];
        for (r, k) in self.lattice.modes().iter().enumerate() {
            let mut acc = ZERO;
            for px in (k[0] - c).max(-c)..=(k[0] + c).min(c) {
                let qx = k[0] - px;
                let kqx = kx_t[(qx + c) as usize];
                for py in (k[1] - c).max(-c)..=(k[1] + c).min(c) {
                    let qy = k[1] - py;
                    let kqy = ky_t[(qy + c) as usize];
                    let pz_lo = (k[2] - c).max(-c);
                    let pz_hi = (k[2] + c).min(c);
                    let p_base = dense_index(cut, [px, py, 0]);
                    let q_base = dense_index(cut, [qx, qy, 0]);
                    for pz in pz_lo..=pz_hi {
                        let qz = k[2] - pz;
                        let up = &du[(p_base as i64 + pz as i64) as usize];
                        let vq = &dv[(q_base as i64 + qz as i64) as usize];
                        let kqz = kz_t[(qz + c) as usize];
                        // s = up . kappa(q); term = i s vq
                        let s = up[0] * kqx + up[1] * kqy + up[2] * kqz;
                        let is = Complex64::new(-s.im, s.re);
                        acc[0] += is * vq[0];
                        acc[1] += is * vq[1];
                        acc[2] += is * vq[2];
                    }
                }
            }
            out[r] = acc;
        }
        debug_assert_eq!(side * side * side, du.len());
        out
    }
}

/// Full-lattice coefficients on the dense cube `[-K, K]^3` (origin zero).
pub(crate) fn expand_dense(u: &VelocityField) -> Vec<Coeff> {
    let lat = &u.lattice;
    lat.dense_lookup()
        .iter()
        .map(|slot| match slot {
            Some((i, false)) => u.coeffs[*i],
            Some((i, true)) => u.coeffs[*i].map(|z| z.conj()),
            None => ZERO,
        })
        .collect()
}

/// `B(u, v)` by direct convolution.
pub fn nonlinear_b(u: &VelocityField, v: &VelocityField) -> Result<VelocityField> {
    Nonlinear::new(u.lattice(), NonlinearScheme::Convolution).apply(u, v)
}

/// `b(u, v, w) = (B(u, v), w)_{L2}`.
///
/// Since `w` is divergence free and truncated, this equals the untruncated
/// integral of `(u . grad) v . w` over the box.
pub fn trilinear_b(u: &VelocityField, v: &VelocityField, w: &VelocityField) -> Result<f64> {
    u.check_lattice(w)?;
    let b = nonlinear_b(u, v)?;
    Ok(l2_inner_unchecked(&b, w))
}

struct Pseudospectral {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Pseudospectral {
    fn new(lattice: &WaveLattice) -> Self {
        let n = 3 * lattice.cutoff() + 1;
        let mut planner = FftPlanner::new();
        Pseudospectral {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    fn grid_index(&self, k: [i32; 3]) -> usize {
        let n = self.n as i32;
        let w = |c: i32| c.rem_euclid(n) as usize;
        (w(k[0]) * self.n + w(k[1])) * self.n + w(k[2])
    }

    fn transform(&self, data: &mut [Complex64], fft: &dyn Fft<f64>) {
        let n = self.n;
        // z lines are contiguous
        fft.process(data);
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for ix in 0..n {
            for iz in 0..n {
                for iy in 0..n {
                    line[iy] = data[(ix * n + iy) * n + iz];
                }
                fft.process(&mut line);
                for iy in 0..n {
                    data[(ix * n + iy) * n + iz] = line[iy];
                }
            }
        }
        for iy in 0..n {
            for iz in 0..n {
                for ix in 0..n {
                    line[ix] = data[(ix * n + iy) * n + iz];
                }
                fft.process(&mut line);
                for ix in 0..n {
                    data[(ix * n + iy) * n + iz] = line[ix];
                }
            }
        }
    }

    fn to_physical(&self, lattice: &WaveLattice, coeffs: &[Coeff], comp: usize, deriv: Option<usize>) -> Vec<Complex64> {
        let mut data = vec![Complex64::new(0.0, 0.0); self.n * self.n * self.n];
        for ((k, c), kap) in lattice.modes().iter().zip(coeffs).zip(lattice.wavenumbers()) {
            let mut z = c[comp];
            if let Some(j) = deriv {
                z *= Complex64::new(0.0, kap[j]);
            }
            data[self.grid_index(*k)] = z;
            data[self.grid_index([-k[0], -k[1], -k[2]])] = z.conj();
        }
        self.transform(&mut data, self.inverse.as_ref());
        data
    }

    fn advect(&self, lattice: &WaveLattice, u: &VelocityField, v: &VelocityField) -> Vec<Coeff> {
        let npts = self.n * self.n * self.n;
        let uphys: Vec<Vec<Complex64>> = (0..3)
            .map(|j| self.to_physical(lattice, &u.coeffs, j, None))
            .collect();
        let mut out = vec![ZERO; lattice.len()];
        let norm = 1.0 / npts as f64;
        for i in 0..3 {
            let mut prod = vec![Complex64::new(0.0, 0.0); npts];
            for (j, uj) in uphys.iter().enumerate() {
                let grad = self.to_physical(lattice, &v.coeffs, i, Some(j));
                for ((p, a), g) in prod.iter_mut().zip(uj).zip(&grad) {
                    // physical values are real up to round-off
                    *p += Complex64::new(a.re * g.re, 0.0);
                }
            }
            self.transform(&mut prod, self.forward.as_ref());
            for (r, k) in lattice.modes().iter().enumerate() {
                out[r][i] = prod[self.grid_index(*k)] * norm;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::BoxParams;

    fn lat(cutoff: usize) -> Arc<WaveLattice> {
        Arc::new(WaveLattice::new(BoxParams::periodic_cube(0.1, cutoff).unwrap()).unwrap())
    }

    #[test]
    fn single_mode_self_interaction_vanishes() {
        let l = lat(2);
        let u = VelocityField::eigenmode(&l, [1, 2, 0], 0, 3.0).unwrap();
        let b = nonlinear_b(&u, &u).unwrap();
        assert!(b.energy().sqrt() < 1e-13);
    }

    #[test]
    fn zero_first_argument() {
        let l = lat(2);
        let z = VelocityField::zeros(&l);
        let v = VelocityField::eigenmode(&l, [1, 0, 0], 0, 1.0).unwrap();
        let w = VelocityField::eigenmode(&l, [0, 1, 1], 1, 1.0).unwrap();
        assert_eq!(trilinear_b(&z, &v, &w).unwrap(), 0.0);
    }

    #[test]
    fn abc_is_a_steady_euler_flow() {
        let l = lat(2);
        let u = VelocityField::abc(&l, 1.0, 0.7, 0.3).unwrap();
        let b = nonlinear_b(&u, &u).unwrap();
        assert!(b.norm() < 1e-13 * u.norm().powi(2));
        let ps = Nonlinear::new(&l, NonlinearScheme::Pseudospectral).apply(&u, &u).unwrap();
        assert!(ps.norm() < 1e-12 * u.norm().powi(2));
    }

    #[test]
    fn evaluator_reports_scheme() {
        let l = lat(1);
        assert_eq!(Nonlinear::new(&l, NonlinearScheme::Pseudospectral).scheme(), NonlinearScheme::Pseudospectral);
        assert_eq!(Nonlinear::new(&l, NonlinearScheme::Convolution).scheme(), NonlinearScheme::Convolution);
    }
}
