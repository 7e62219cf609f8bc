use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::config::ClampMode;
use crate::error::{Error, Result};
use crate::measure::PhaseMeasure;
use crate::spectral::{polarization_basis, VelocityField, WaveLattice};

/// Truncated Gaussian on the divergence-free Galerkin space.
///
/// Each lattice representative `k` and polarization `p` carries an
/// independent complex amplitude `z_{k,p}` with `E|z|^2 = sigma_k^2`,
/// `sigma_k^2 = c lambda_k^-s`, and contributes `z e_p / sqrt(2 |Omega|)`
/// to the coefficient at `k`. Since `|u|^2 = sum |z_{k,p}|^2`, the mean
/// energy is `sum_{k,p} sigma_k^2`, which `c` sets to the requested value.
/// Each `|z|^2` is exponential, so `Var |u|^2 = sum_{k,p} sigma_k^4`.
#[derive(Debug, Clone)]
pub struct SpectralGaussian {
    lattice: Arc<WaveLattice>,
    variances: Vec<f64>,
}

impl SpectralGaussian {
    pub fn new(lattice: &Arc<WaveLattice>, energy: f64, slope: f64) -> Result<Self> {
        if !(energy.is_finite() && energy > 0.0) || !slope.is_finite() {
            return Err(Error::invalid(format!("need energy > 0 and finite slope, got {energy}, {slope}")));
        }
        let shape: Vec<f64> = lattice.eigenvalues().iter().map(|l| l.powf(-slope)).collect();
        let total: f64 = 2.0 * shape.iter().sum::<f64>();
        let c = energy / total;
        Ok(SpectralGaussian {
            lattice: lattice.clone(),
            variances: shape.into_iter().map(|s| c * s).collect(),
        })
    }

    /// `sigma_k^2` for each lattice representative, per polarization.
    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn mean_energy(&self) -> f64 {
        2.0 * self.variances.iter().sum::<f64>()
    }

    /// Standard deviation of `|u|^2` for one draw.
    pub fn energy_std(&self) -> f64 {
        (2.0 * self.variances.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    /// One draw. Normals are consumed mode by mode in lattice order, each
    /// polarization taking a real then an imaginary part, so a seed fixes
    /// the sample on every platform.
    pub fn sample(&self, rng: &mut impl Rng) -> VelocityField {
        let scale = 1.0 / (2.0 * self.lattice.volume()).sqrt();
        let coeffs = self
            .lattice
            .wavenumbers()
            .iter()
            .zip(&self.variances)
            .map(|(kappa, var)| {
                let [e1, e2] = polarization_basis(kappa);
                let s = (0.5 * var).sqrt();
                let mut draw = || {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(s * re, s * im)
                };
                let z1 = draw();
                let z2 = draw();
                [0, 1, 2].map(|c| (z1 * e1[c] + z2 * e2[c]) * scale)
            })
            .collect();
        VelocityField::from_coeffs(&self.lattice, coeffs).expect("polarization vectors are divergence free")
    }
}

/// Rescales `u` onto the sphere of radius `r`, nudging towards the origin
/// until `|u| <= r` holds in floating point. A zero field is left alone.
pub fn rescale_to_radius(u: &VelocityField, r: f64) -> VelocityField {
    let n = u.norm();
    if n == 0.0 {
        return u.clone();
    }
    let mut s = r / n;
    let mut v = u.scaled(s);
    while v.norm() > r {
        s *= 1.0 - f64::EPSILON;
        v = u.scaled(s);
    }
    v
}

/// Applies the radius clamp to one atom.
pub fn clamp_atom(u: VelocityField, radius: Option<f64>, mode: ClampMode) -> VelocityField {
    match (radius, mode) {
        (None, _) => u,
        (Some(r), ClampMode::Rescale) if u.norm() <= r => u,
        (Some(r), _) => rescale_to_radius(&u, r),
    }
}

/// Equal-weight measure of `atoms` draws with seed `seed` (ChaCha8).
pub fn sample_gaussian_measure(
    lattice: &Arc<WaveLattice>,
    seed: u64,
    atoms: usize,
    energy: f64,
    slope: f64,
    radius: Option<f64>,
    clamp: ClampMode,
) -> Result<PhaseMeasure> {
    let g = SpectralGaussian::new(lattice, energy, slope)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fields = (0..atoms).map(|_| clamp_atom(g.sample(&mut rng), radius, clamp)).collect();
    PhaseMeasure::uniform(fields)
}
