use std::sync::Arc;

use num_complex::Complex64;

use super::lattice::WaveLattice;
use crate::error::{Error, Result};

/// Complex 3-vector coefficient attached to one wavevector.
pub type Coeff = [Complex64; 3];

pub(crate) const ZERO: Coeff = [Complex64::new(0.0, 0.0); 3];

/// Relative divergence residual accepted for externally supplied fields.
pub const DIVERGENCE_TOL: f64 = 1e-10;

/// Fourier coefficients on the half-lattice with no divergence constraint.
///
/// The input type of the Leray projector.
#[derive(Debug, Clone)]
pub struct RawField {
    pub(crate) lattice: Arc<WaveLattice>,
    pub(crate) coeffs: Vec<Coeff>,
}

/// Real, mean-zero, divergence-free velocity field truncated to the lattice:
///
/// `u(x) = sum_k c(k) exp(i kappa(k) . x)`, `kappa_i = 2 pi k_i / L_i`,
///
/// with `c(-k) = conj(c(k))` implied and `kappa . c(k) = 0`.
#[derive(Debug, Clone)]
pub struct VelocityField {
    pub(crate) lattice: Arc<WaveLattice>,
    pub(crate) coeffs: Vec<Coeff>,
}

/// Element of `V` used in dualities and cylindrical test functions.
pub type TestField = VelocityField;

fn dot_kc(kappa: &[f64; 3], c: &Coeff) -> Complex64 {
    c[0] * kappa[0] + c[1] * kappa[1] + c[2] * kappa[2]
}

impl RawField {
    pub fn zeros(lattice: &Arc<WaveLattice>) -> Self {
        RawField {
            lattice: lattice.clone(),
            coeffs: vec![ZERO; lattice.len()],
        }
    }

    pub fn from_coeffs(lattice: &Arc<WaveLattice>, coeffs: Vec<Coeff>) -> Result<Self> {
        if coeffs.len() != lattice.len() {
            return Err(Error::invalid(format!(
                "expected {} coefficients, got {}",
                lattice.len(),
                coeffs.len()
            )));
        }
        Ok(RawField {
            lattice: lattice.clone(),
            coeffs,
        })
    }

    pub fn lattice(&self) -> &Arc<WaveLattice> {
        &self.lattice
    }

    pub fn coeffs(&self) -> &[Coeff] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Coeff] {
        &mut self.coeffs
    }

    /// Set the coefficient of wavevector `k` (either member of the pair).
    pub fn set(&mut self, k: [i32; 3], c: Coeff) -> Result<()> {
        let (i, conj) = self
            .lattice
            .locate(k)
            .ok_or_else(|| Error::invalid(format!("wavevector {k:?} not on lattice")))?;
        self.coeffs[i] = if conj { c.map(|z| z.conj()) } else { c };
        Ok(())
    }
}

impl VelocityField {
    pub fn zeros(lattice: &Arc<WaveLattice>) -> Self {
        VelocityField {
            lattice: lattice.clone(),
            coeffs: vec![ZERO; lattice.len()],
        }
    }

    /// Wraps coefficients after checking the divergence constraint to
    /// [`DIVERGENCE_TOL`].
    pub fn from_coeffs(lattice: &Arc<WaveLattice>, coeffs: Vec<Coeff>) -> Result<Self> {
        let raw = RawField::from_coeffs(lattice, coeffs)?;
        let field = VelocityField {
            lattice: raw.lattice,
            coeffs: raw.coeffs,
        };
        let residual = field.divergence_residual();
        if residual > DIVERGENCE_TOL {
            return Err(Error::NotDivergenceFree { residual });
        }
        Ok(field)
    }

    pub(crate) fn from_coeffs_unchecked(lattice: &Arc<WaveLattice>, coeffs: Vec<Coeff>) -> Self {
        debug_assert_eq!(coeffs.len(), lattice.len());
        VelocityField {
            lattice: lattice.clone(),
            coeffs,
        }
    }

    /// Real eigenfunction `a * sqrt(2/|Omega|) * e * cos(kappa . x)` of the
    /// Stokes operator with `|u|_{L2} = amplitude`. `polarization` 0 or 1
    /// selects one of two orthonormal directions perpendicular to `kappa`.
    pub fn eigenmode(
        lattice: &Arc<WaveLattice>,
        k: [i32; 3],
        polarization: usize,
        amplitude: f64,
    ) -> Result<Self> {
        let (i, _) = lattice
            .locate(k)
            .ok_or_else(|| Error::invalid(format!("wavevector {k:?} not on lattice")))?;
        let dirs = polarization_basis(&lattice.wavenumbers()[i]);
        let e = dirs
            .get(polarization)
            .ok_or_else(|| Error::invalid(format!("polarization {polarization} not in 0..2")))?;
        let scale = amplitude / (2.0 * lattice.volume()).sqrt();
        let mut coeffs = vec![ZERO; lattice.len()];
        coeffs[i] = e.map(|x| Complex64::new(scale * x, 0.0));
        Ok(VelocityField {
            lattice: lattice.clone(),
            coeffs,
        })
    }

    /// Arnold-Beltrami-Childress field
    /// `(A sin z + C cos y, B sin x + A cos z, C sin y + B cos x)` on the
    /// first shell of a cubic box. It satisfies `curl u = kappa u`.
    pub fn abc(lattice: &Arc<WaveLattice>, a: f64, b: f64, c: f64) -> Result<Self> {
        let l = lattice.params().lengths;
        if (l[0] - l[1]).abs() > 1e-12 * l[0] || (l[0] - l[2]).abs() > 1e-12 * l[0] {
            return Err(Error::invalid("ABC field requires a cubic box"));
        }
        let mut raw = RawField::zeros(lattice);
        let half = |x: f64| Complex64::new(0.5 * x, 0.0);
        let mhalf_i = |x: f64| Complex64::new(0.0, -0.5 * x);
        raw.set([0, 0, 1], [mhalf_i(a), half(a), half(0.0)])?;
        raw.set([1, 0, 0], [half(0.0), mhalf_i(b), half(b)])?;
        raw.set([0, 1, 0], [half(c), half(0.0), mhalf_i(c)])?;
        VelocityField::from_coeffs(lattice, raw.coeffs)
    }

    pub fn lattice(&self) -> &Arc<WaveLattice> {
        &self.lattice
    }

    pub fn coeffs(&self) -> &[Coeff] {
        &self.coeffs
    }

    pub fn into_raw(self) -> RawField {
        RawField {
            lattice: self.lattice,
            coeffs: self.coeffs,
        }
    }

    pub fn coeff(&self, k: [i32; 3]) -> Option<Coeff> {
        let (i, conj) = self.lattice.locate(k)?;
        let c = self.coeffs[i];
        Some(if conj { c.map(|z| z.conj()) } else { c })
    }

    /// `max_k |kappa . c(k)| / (|kappa| max_k |c(k)|)`, zero for the zero field.
    pub fn divergence_residual(&self) -> f64 {
        let cmax = self
            .coeffs
            .iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        if cmax == 0.0 {
            return 0.0;
        }
        self.coeffs
            .iter()
            .zip(self.lattice.wavenumbers())
            .map(|(c, kap)| {
                let kn = kap.iter().map(|x| x * x).sum::<f64>().sqrt();
                dot_kc(kap, c).norm() / kn
            })
            .fold(0.0, f64::max)
            / cmax
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    pub fn same_lattice(&self, other: &VelocityField) -> bool {
        Arc::ptr_eq(&self.lattice, &other.lattice) || self.lattice.same_as(&other.lattice)
    }

    pub(crate) fn check_lattice(&self, other: &VelocityField) -> Result<()> {
        if self.same_lattice(other) {
            Ok(())
        } else {
            Err(Error::LatticeMismatch)
        }
    }

    /// `|u|^2_{L2}`.
    pub fn energy(&self) -> f64 {
        2.0 * self.lattice.volume()
            * self
                .coeffs
                .iter()
                .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>())
                .sum::<f64>()
    }

    /// `|u|_{L2}`.
    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }

    /// `||u||^2_{H1} = ((u, u))`.
    pub fn enstrophy(&self) -> f64 {
        2.0 * self.lattice.volume()
            * self
                .coeffs
                .iter()
                .zip(self.lattice.eigenvalues())
                .map(|(c, lam)| lam * c.iter().map(|z| z.norm_sqr()).sum::<f64>())
                .sum::<f64>()
    }

    pub fn scaled(&self, s: f64) -> Self {
        VelocityField {
            lattice: self.lattice.clone(),
            coeffs: self.coeffs.iter().map(|c| c.map(|z| z * s)).collect(),
        }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &VelocityField) -> Result<Self> {
        self.check_lattice(other)?;
        Ok(VelocityField {
            lattice: self.lattice.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| [0, 1, 2].map(|i| a[i] + b[i] * s))
                .collect(),
        })
    }

    pub fn sub(&self, other: &VelocityField) -> Result<Self> {
        self.add_scaled(-1.0, other)
    }

    /// Largest absolute coefficient difference relative to the larger field.
    pub fn max_rel_diff(&self, other: &VelocityField) -> Result<f64> {
        self.check_lattice(other)?;
        let mut diff = 0.0f64;
        let mut scale = 0.0f64;
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            for i in 0..3 {
                diff = diff.max((a[i] - b[i]).norm());
                scale = scale.max(a[i].norm()).max(b[i].norm());
            }
        }
        Ok(if scale == 0.0 { diff } else { diff / scale })
    }
}

impl PartialEq for VelocityField {
    fn eq(&self, other: &Self) -> bool {
        self.same_lattice(other) && self.coeffs == other.coeffs
    }
}

/// Two orthonormal real vectors perpendicular to `kappa`.
pub fn polarization_basis(kappa: &[f64; 3]) -> [[f64; 3]; 2] {
    let n = kappa.iter().map(|x| x * x).sum::<f64>().sqrt();
    let k = kappa.map(|x| x / n);
    // least aligned axis
    let mut axis = 0;
    for i in 1..3 {
        if k[i].abs() < k[axis].abs() {
            axis = i;
        }
    }
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let proj = k[axis];
    let mut e1 = [0, 1, 2].map(|i| e[i] - proj * k[i]);
    let n1 = e1.iter().map(|x| x * x).sum::<f64>().sqrt();
    e1 = e1.map(|x| x / n1);
    let e2 = [
        k[1] * e1[2] - k[2] * e1[1],
        k[2] * e1[0] - k[0] * e1[2],
        k[0] * e1[1] - k[1] * e1[0],
    ];
    [e1, e2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::BoxParams;

    fn lat(cutoff: usize) -> Arc<WaveLattice> {
        Arc::new(WaveLattice::new(BoxParams::periodic_cube(0.1, cutoff).unwrap()).unwrap())
    }

    #[test]
    fn eigenmode_is_unit_normalized() {
        let l = lat(2);
        let w = VelocityField::eigenmode(&l, [1, -1, 2], 1, 1.0).unwrap();
        assert!((w.energy() - 1.0).abs() < 1e-14);
        assert!((w.enstrophy() - 6.0).abs() < 1e-13);
        assert!(w.divergence_residual() < 1e-15);
    }

    #[test]
    fn polarization_basis_is_orthonormal() {
        let kap = [0.3, -1.2, 2.0];
        let [e1, e2] = polarization_basis(&kap);
        let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        assert!(dot(&e1, &kap).abs() < 1e-14);
        assert!(dot(&e2, &kap).abs() < 1e-14);
        assert!(dot(&e1, &e2).abs() < 1e-14);
        assert!((dot(&e1, &e1) - 1.0).abs() < 1e-14);
        assert!((dot(&e2, &e2) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn abc_field_energy() {
        let l = lat(1);
        let u = VelocityField::abc(&l, 1.0, 0.5, 0.25).unwrap();
        // |u|^2 = |Omega| (A^2 + B^2 + C^2)
        let expect = l.volume() * (1.0 + 0.25 + 0.0625);
        assert!((u.energy() - expect).abs() < 1e-12 * expect);
        assert!(u.divergence_residual() < 1e-15);
    }

    #[test]
    fn rejects_divergent_coefficients() {
        let l = lat(1);
        let mut raw = RawField::zeros(&l);
        raw.set([1, 0, 0], [Complex64::new(1.0, 0.0), ZERO[0], ZERO[0]]).unwrap();
        assert!(matches!(
            VelocityField::from_coeffs(&l, raw.coeffs),
            Err(Error::NotDivergenceFree { .. })
        ));
    }

    #[test]
    fn set_conjugate_partner() {
        let l = lat(1);
        let mut raw = RawField::zeros(&l);
        let c = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 2.0), Complex64::new(0.0, 0.0)];
        raw.set([-1, 0, 0], c).unwrap();
        let (i, _) = l.locate([1, 0, 0]).unwrap();
        assert_eq!(raw.coeffs[i][1], Complex64::new(1.0, -2.0));
    }
}
