use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic box `(0, L1) x (0, L2) x (0, L3)`, kinematic viscosity and
/// spectral cutoff. Wavevectors with `max_i |k_i| <= cutoff`, `k != 0`
/// are retained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxParams {
    pub lengths: [f64; 3],
    pub viscosity: f64,
    pub cutoff: usize,
}

impl BoxParams {
    pub fn new(lengths: [f64; 3], viscosity: f64, cutoff: usize) -> Result<Self> {
        let params = BoxParams {
            lengths,
            viscosity,
            cutoff,
        };
        params.validate()?;
        Ok(params)
    }

    /// `2*pi`-periodic cube.
    pub fn periodic_cube(viscosity: f64, cutoff: usize) -> Result<Self> {
        Self::new([2.0 * PI; 3], viscosity, cutoff)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.lengths.iter().all(|l| l.is_finite() && *l > 0.0) {
            return Err(Error::invalid(format!(
                "box lengths must be positive, got {:?}",
                self.lengths
            )));
        }
        if !(self.viscosity.is_finite() && self.viscosity > 0.0) {
            return Err(Error::invalid(format!(
                "viscosity must be positive, got {}",
                self.viscosity
            )));
        }
        if self.cutoff == 0 {
            return Err(Error::invalid("cutoff must be at least 1"));
        }
        Ok(())
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }
}

/// Half-lattice of retained wavevectors, sorted by Stokes eigenvalue.
///
/// Only one representative of each pair `{k, -k}` is stored: the one whose
/// first nonzero component is positive. The conjugate partner is implied by
/// the reality condition `c(-k) = conj(c(k))`.
///
/// Storage order is the mode order: nondecreasing eigenvalue, ties broken
/// lexicographically on the integer wavevector. The Galerkin projector
/// `P_m` keeps the first `m` entries.
#[derive(Debug, Clone)]
pub struct WaveLattice {
    params: BoxParams,
    modes: Vec<[i32; 3]>,
    wavenumbers: Vec<[f64; 3]>,
    eigenvalues: Vec<f64>,
    // dense cube index -> (mode index, conjugated)
    dense: Vec<Option<(usize, bool)>>,
}

pub(crate) fn is_representative(k: [i32; 3]) -> bool {
    match k.iter().find(|c| **c != 0) {
        Some(c) => *c > 0,
        None => false,
    }
}

impl WaveLattice {
    pub fn new(params: BoxParams) -> Result<Self> {
        params.validate()?;
        let cut = params.cutoff as i32;
        let mut modes = Vec::new();
        for kx in -cut..=cut {
            for ky in -cut..=cut {
                for kz in -cut..=cut {
                    let k = [kx, ky, kz];
                    if is_representative(k) {
                        modes.push(k);
                    }
                }
            }
        }
        let wavenumber = |k: &[i32; 3]| -> [f64; 3] {
            [0, 1, 2].map(|i| 2.0 * PI * k[i] as f64 / params.lengths[i])
        };
        let eigenvalue = |k: &[i32; 3]| -> f64 { wavenumber(k).iter().map(|x| x * x).sum() };
        modes.sort_by(|a, b| {
            eigenvalue(a)
                .partial_cmp(&eigenvalue(b))
                .expect("finite eigenvalues")
                .then_with(|| a.cmp(b))
        });
        let wavenumbers: Vec<_> = modes.iter().map(wavenumber).collect();
        let eigenvalues: Vec<_> = modes.iter().map(eigenvalue).collect();

        let side = 2 * params.cutoff + 1;
        let mut dense = vec![None; side * side * side];
        for (i, k) in modes.iter().enumerate() {
            let neg = [-k[0], -k[1], -k[2]];
            dense[dense_index(params.cutoff, *k)] = Some((i, false));
            dense[dense_index(params.cutoff, neg)] = Some((i, true));
        }

        Ok(WaveLattice {
            params,
            modes,
            wavenumbers,
            eigenvalues,
            dense,
        })
    }

    pub fn params(&self) -> &BoxParams {
        &self.params
    }

    pub fn cutoff(&self) -> usize {
        self.params.cutoff
    }

    pub fn volume(&self) -> f64 {
        self.params.volume()
    }

    /// Number of stored representatives (the Galerkin mode count).
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[[i32; 3]] {
        &self.modes
    }

    pub fn wavenumbers(&self) -> &[[f64; 3]] {
        &self.wavenumbers
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// First Stokes eigenvalue, `min_i (2 pi / L_i)^2`.
    pub fn lambda1(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Position of `k` in mode order and whether `k` is the conjugate
    /// partner of the stored representative.
    pub fn locate(&self, k: [i32; 3]) -> Option<(usize, bool)> {
        let cut = self.params.cutoff as i32;
        if k.iter().any(|c| c.abs() > cut) {
            return None;
        }
        self.dense[dense_index(self.params.cutoff, k)]
    }

    /// Distinct eigenvalues with the number of representatives on each
    /// shell, in increasing order.
    pub fn shells(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &lam in &self.eigenvalues {
            match out.last_mut() {
                Some((l, n)) if (*l - lam).abs() <= 1e-12 * lam => *n += 1,
                _ => out.push((lam, 1)),
            }
        }
        out
    }

    /// Index one past the last mode whose eigenvalue is `<= lambda`.
    pub fn shell_end(&self, lambda: f64) -> usize {
        self.eigenvalues
            .iter()
            .take_while(|&&l| l <= lambda * (1.0 + 1e-12))
            .count()
    }

    pub(crate) fn dense_side(&self) -> usize {
        2 * self.params.cutoff + 1
    }

    pub(crate) fn dense_lookup(&self) -> &[Option<(usize, bool)>] {
        &self.dense
    }

    pub fn same_as(&self, other: &WaveLattice) -> bool {
        std::ptr::eq(self, other) || self.params == other.params
    }
}

pub(crate) fn dense_index(cutoff: usize, k: [i32; 3]) -> usize {
    let side = 2 * cutoff + 1;
    let c = cutoff as i32;
    (((k[0] + c) as usize) * side + (k[1] + c) as usize) * side + (k[2] + c) as usize
}
