//! Inner products, norms and linear operators on truncated fields.

use super::field::{Coeff, RawField, VelocityField};
use crate::error::{Error, Result};

#[inline]
fn pair_re(a: &Coeff, b: &Coeff) -> f64 {
    (a[0] * b[0].conj() + a[1] * b[1].conj() + a[2] * b[2].conj()).re
}

pub(crate) fn l2_inner_unchecked(u: &VelocityField, v: &VelocityField) -> f64 {
    let s: f64 = u
        .coeffs
        .iter()
        .zip(&v.coeffs)
        .map(|(a, b)| pair_re(a, b))
        .sum();
    2.0 * u.lattice.volume() * s
}

pub(crate) fn v_inner_unchecked(u: &VelocityField, v: &VelocityField) -> f64 {
    let s: f64 = u
        .coeffs
        .iter()
        .zip(&v.coeffs)
        .zip(u.lattice.eigenvalues())
        .map(|((a, b), lam)| lam * pair_re(a, b))
        .sum();
    2.0 * u.lattice.volume() * s
}

/// `(u, v)_{L2} = integral over Omega of u . v`, evaluated by Parseval.
pub fn l2_inner(u: &VelocityField, v: &VelocityField) -> Result<f64> {
    u.check_lattice(v)?;
    Ok(l2_inner_unchecked(u, v))
}

/// `((u, v)) = integral of grad u : grad v = sum_k lambda(k) c_u(k) . conj(c_v(k)) |Omega|`.
pub fn v_inner(u: &VelocityField, v: &VelocityField) -> Result<f64> {
    u.check_lattice(v)?;
    Ok(v_inner_unchecked(u, v))
}

/// `||u||_{H1}`.
pub fn h1_norm(u: &VelocityField) -> f64 {
    u.enstrophy().sqrt()
}

/// `||u||_{V'}`.
///
/// The supremum over `V` is attained on the truncated space itself since
/// `A` is diagonal, so the value here is exact for truncated fields. For a
/// field with content above the cutoff it would only be a lower bound.
pub fn dual_norm_vprime(u: &VelocityField) -> f64 {
    let s: f64 = u
        .coeffs
        .iter()
        .zip(u.lattice.eigenvalues())
        .map(|(c, lam)| c.iter().map(|z| z.norm_sqr()).sum::<f64>() / lam)
        .sum();
    (2.0 * u.lattice.volume() * s).sqrt()
}

/// Stokes operator `A`, diagonal with `lambda(k)`.
pub fn stokes_apply(u: &VelocityField) -> VelocityField {
    VelocityField {
        lattice: u.lattice.clone(),
        coeffs: u
            .coeffs
            .iter()
            .zip(u.lattice.eigenvalues())
            .map(|(c, lam)| c.map(|z| z * *lam))
            .collect(),
    }
}

pub(crate) fn leray_in_place(coeffs: &mut [Coeff], wavenumbers: &[[f64; 3]], eigenvalues: &[f64]) {
    for ((c, kap), lam) in coeffs.iter_mut().zip(wavenumbers).zip(eigenvalues) {
        let d = (c[0] * kap[0] + c[1] * kap[1] + c[2] * kap[2]) / *lam;
        for i in 0..3 {
            c[i] -= d * kap[i];
        }
    }
}

/// Leray-Helmholtz projection `c(k) - (kappa . c) kappa / |kappa|^2`.
pub fn leray_project(w: &RawField) -> VelocityField {
    let mut coeffs = w.coeffs.clone();
    leray_in_place(&mut coeffs, w.lattice.wavenumbers(), w.lattice.eigenvalues());
    VelocityField {
        lattice: w.lattice.clone(),
        coeffs,
    }
}

/// Galerkin projector `P_m`: keeps the first `m` modes in mode order.
pub fn galerkin_project(u: &VelocityField, m: usize) -> Result<VelocityField> {
    let max = u.lattice.len();
    if m == 0 || m > max {
        return Err(Error::ModeOutOfRange { m, max });
    }
    let mut coeffs = u.coeffs.clone();
    for c in coeffs.iter_mut().skip(m) {
        *c = super::field::ZERO;
    }
    Ok(VelocityField {
        lattice: u.lattice.clone(),
        coeffs,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use num_complex::Complex64;

    use super::*;
    use crate::spectral::{BoxParams, WaveLattice};

    fn lat(cutoff: usize) -> Arc<WaveLattice> {
        Arc::new(WaveLattice::new(BoxParams::periodic_cube(0.1, cutoff).unwrap()).unwrap())
    }

    #[test]
    fn zero_and_unit_mode() {
        let l = lat(2);
        let w = VelocityField::eigenmode(&l, [2, 1, 0], 0, 1.0).unwrap();
        let z = VelocityField::zeros(&l);
        assert_eq!(l2_inner(&z, &w).unwrap(), 0.0);
        assert!((l2_inner(&w, &w).unwrap() - 1.0).abs() < 1e-14);
        assert!((v_inner(&w, &w).unwrap() - 5.0).abs() < 1e-13);
        assert!((dual_norm_vprime(&w) - 1.0 / 5f64.sqrt()).abs() < 1e-14);
        assert_eq!(dual_norm_vprime(&z), 0.0);
        assert_eq!(h1_norm(&z), 0.0);
    }

    #[test]
    fn stokes_on_eigenmode() {
        let l = lat(2);
        let w = VelocityField::eigenmode(&l, [1, 1, 1], 1, 2.0).unwrap();
        let aw = stokes_apply(&w);
        assert!(aw.max_rel_diff(&w.scaled(3.0)).unwrap() < 1e-15);
        let z = VelocityField::zeros(&l);
        assert_eq!(stokes_apply(&z), z);
    }

    #[test]
    fn leray_kills_gradients_and_keeps_solenoidal() {
        let l = lat(2);
        let mut raw = RawField::zeros(&l);
        for (i, kap) in l.wavenumbers().iter().enumerate() {
            let phi = Complex64::new(0.3 + i as f64, -0.7);
            raw.coeffs[i] = kap.map(|x| phi * x);
        }
        let p = leray_project(&raw);
        assert!(p.coeffs.iter().flatten().all(|z| z.norm() < 1e-13));

        let w = VelocityField::eigenmode(&l, [0, 2, 1], 0, 1.0).unwrap();
        let back = leray_project(&w.clone().into_raw());
        assert!(back.max_rel_diff(&w).unwrap() < 1e-16);
    }

    #[test]
    fn lattice_mismatch_is_an_error() {
        let a = VelocityField::zeros(&lat(1));
        let b = VelocityField::zeros(&lat(2));
        assert!(matches!(l2_inner(&a, &b), Err(Error::LatticeMismatch)));
        assert!(matches!(v_inner(&a, &b), Err(Error::LatticeMismatch)));
    }

    #[test]
    fn galerkin_bounds() {
        let l = lat(1);
        let u = VelocityField::eigenmode(&l, [1, 0, 0], 0, 1.0).unwrap();
        assert!(matches!(galerkin_project(&u, 0), Err(Error::ModeOutOfRange { .. })));
        assert!(matches!(galerkin_project(&u, 14), Err(Error::ModeOutOfRange { .. })));
        assert_eq!(galerkin_project(&u, 13).unwrap(), u);
    }
}
