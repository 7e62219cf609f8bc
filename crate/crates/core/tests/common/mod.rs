#![allow(dead_code)]

use std::sync::Arc;

use nsestat::spectral::{leray_project, BoxParams, RawField, VelocityField, WaveLattice};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cube(nu: f64, cutoff: usize) -> Arc<WaveLattice> {
    Arc::new(WaveLattice::new(BoxParams::periodic_cube(nu, cutoff).unwrap()).unwrap())
}

pub fn boxed(lengths: [f64; 3], nu: f64, cutoff: usize) -> Arc<WaveLattice> {
    Arc::new(WaveLattice::new(BoxParams::new(lengths, nu, cutoff).unwrap()).unwrap())
}

/// Uniform coefficients in [-1, 1] + i[-1, 1], Leray projected.
pub fn random_field(lattice: &Arc<WaveLattice>, rng: &mut impl Rng) -> VelocityField {
    let mut raw = RawField::zeros(lattice);
    for c in raw.coeffs_mut() {
        for z in c.iter_mut() {
            *z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    }
    leray_project(&raw)
}

pub fn random_raw(lattice: &Arc<WaveLattice>, rng: &mut impl Rng) -> RawField {
    let mut raw = RawField::zeros(lattice);
    for c in raw.coeffs_mut() {
        for z in c.iter_mut() {
            *z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    }
    raw
}

/// Physical-space samples of a field on an `m^3` uniform grid, computed by
/// direct summation of the Fourier series (no FFT). Returns velocity and
/// gradient `grad[i][j] = d u_i / d x_j` at every point.
pub struct PhysicalSamples {
    pub m: usize,
    pub volume: f64,
    pub u: Vec<[f64; 3]>,
    pub grad: Vec<[[f64; 3]; 3]>,
}

pub fn sample_physical(field: &VelocityField, m: usize) -> PhysicalSamples {
    let lat = field.lattice();
    let l = lat.params().lengths;
    let mut u = Vec::with_capacity(m * m * m);
    let mut grad = Vec::with_capacity(m * m * m);
    for ix in 0..m {
        for iy in 0..m {
            for iz in 0..m {
                let x = [
                    ix as f64 * l[0] / m as f64,
                    iy as f64 * l[1] / m as f64,
                    iz as f64 * l[2] / m as f64,
                ];
                let mut val = [0.0; 3];
                let mut g = [[0.0; 3]; 3];
                for (c, kap) in field.coeffs().iter().zip(lat.wavenumbers()) {
                    let phase = kap[0] * x[0] + kap[1] * x[1] + kap[2] * x[2];
                    let e = Complex64::new(phase.cos(), phase.sin());
                    for i in 0..3 {
                        let z = c[i] * e;
                        val[i] += 2.0 * z.re;
                        for j in 0..3 {
                            // d/dx_j of 2 Re(c e^{i k x}) = 2 Re(i k_j c e^{ikx}) = -2 k_j Im(z)
                            g[i][j] += -2.0 * kap[j] * z.im;
                        }
                    }
                }
                u.push(val);
                grad.push(g);
            }
        }
    }
    PhysicalSamples {
        m,
        volume: lat.volume(),
        u,
        grad,
    }
}

/// Trapezoid rule on the periodic grid (exact for trigonometric
/// polynomials of degree < m).
pub fn quad_inner(a: &PhysicalSamples, b: &PhysicalSamples) -> f64 {
    let s: f64 = a
        .u
        .iter()
        .zip(&b.u)
        .map(|(x, y)| x[0] * y[0] + x[1] * y[1] + x[2] * y[2])
        .sum();
    s * a.volume / a.u.len() as f64
}

/// Quadrature of `integral (u . grad) v . w`.
pub fn quad_trilinear(u: &PhysicalSamples, v: &PhysicalSamples, w: &PhysicalSamples) -> f64 {
    let mut s = 0.0;
    for p in 0..u.u.len() {
        for i in 0..3 {
            let adv: f64 = (0..3).map(|j| u.u[p][j] * v.grad[p][i][j]).sum();
            s += adv * w.u[p][i];
        }
    }
    s * u.volume / u.u.len() as f64
}

pub fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}
