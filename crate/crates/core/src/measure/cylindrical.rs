use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::measures::PhaseMeasure;
use crate::error::{Error, Result};
use crate::spectral::{l2_inner_unchecked, Coeff, RawField, TestField, VelocityField, WaveLattice, leray_project};
use num_complex::Complex64;

/// Polynomial `c0 + b.x + x.Q x` of degree at most two.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticProfile {
    pub constant: f64,
    pub linear: Vec<f64>,
    /// Symmetric `k x k` matrix, row-major.
    pub quadratic: Vec<Vec<f64>>,
}

impl QuadraticProfile {
    pub fn constant(k: usize, c: f64) -> Self {
        QuadraticProfile {
            constant: c,
            linear: vec![0.0; k],
            quadratic: vec![vec![0.0; k]; k],
        }
    }

    pub fn arity(&self) -> usize {
        self.linear.len()
    }

    fn validate(&self, k: usize) -> Result<()> {
        if self.linear.len() != k || self.quadratic.len() != k || self.quadratic.iter().any(|r| r.len() != k) {
            return Err(Error::invalid(format!("profile coefficients do not match arity {k}")));
        }
        for i in 0..k {
            for j in 0..k {
                if self.quadratic[i][j] != self.quadratic[j][i] {
                    return Err(Error::invalid("quadratic profile matrix must be symmetric"));
                }
            }
        }
        let all = std::iter::once(&self.constant).chain(&self.linear).chain(self.quadratic.iter().flatten());
        if all.into_iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("profile coefficients must be finite"));
        }
        Ok(())
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let mut v = self.constant;
        for (i, xi) in x.iter().enumerate() {
            v += self.linear[i] * xi;
            for (j, xj) in x.iter().enumerate() {
                v += self.quadratic[i][j] * xi * xj;
            }
        }
        v
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (0..x.len())
            .map(|j| self.linear[j] + 2.0 * (0..x.len()).map(|i| self.quadratic[j][i] * x[i]).sum::<f64>())
            .collect()
    }
}

/// `eta(s) = (1 - s^2)^2` on `|s| < 1`, zero outside.
fn bump(s: f64) -> f64 {
    if s.abs() < 1.0 {
        let w = 1.0 - s * s;
        w * w
    } else {
        0.0
    }
}

fn bump_derivative(s: f64) -> f64 {
    if s.abs() < 1.0 {
        -4.0 * s * (1.0 - s * s)
    } else {
        0.0
    }
}

/// `Phi(u) = phi((u, v_1), ..., (u, v_k))` with the bump profile
/// `phi(x) = q(x) prod_i eta(x_i / rho_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylindricalTestFunction {
    name: String,
    fields: Vec<TestField>,
    radii: Vec<f64>,
    profile: QuadraticProfile,
}

impl CylindricalTestFunction {
    pub fn new(name: impl Into<String>, fields: Vec<TestField>, radii: Vec<f64>, profile: QuadraticProfile) -> Result<Self> {
        let k = fields.len();
        if k == 0 {
            return Err(Error::invalid("a cylindrical test function needs at least one test field"));
        }
        if radii.len() != k {
            return Err(Error::invalid(format!("{} radii for arity {k}", radii.len())));
        }
        if radii.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
            return Err(Error::invalid("scale radii must be positive and finite"));
        }
        if fields.iter().any(|f| !f.same_lattice(&fields[0])) {
            return Err(Error::LatticeMismatch);
        }
        profile.validate(k)?;
        Ok(CylindricalTestFunction {
            name: name.into(),
            fields,
            radii,
            profile,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.fields.len()
    }

    pub fn fields(&self) -> &[TestField] {
        &self.fields
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn profile(&self) -> &QuadraticProfile {
        &self.profile
    }

    pub fn lattice(&self) -> &Arc<WaveLattice> {
        self.fields[0].lattice()
    }

    /// Coordinates `(u, v_j)`.
    pub fn coordinates(&self, u: &VelocityField) -> Result<Vec<f64>> {
        if !u.same_lattice(&self.fields[0]) {
            return Err(Error::LatticeMismatch);
        }
        Ok(self.fields.iter().map(|v| l2_inner_unchecked(u, v)).collect())
    }

    pub fn profile_value(&self, x: &[f64]) -> f64 {
        let mut env = 1.0;
        for (xi, r) in x.iter().zip(&self.radii) {
            env *= bump(xi / r);
            if env == 0.0 {
                return 0.0;
            }
        }
        self.profile.value(x) * env
    }

    pub fn profile_gradient(&self, x: &[f64]) -> Vec<f64> {
        let k = x.len();
        let eta: Vec<f64> = x.iter().zip(&self.radii).map(|(xi, r)| bump(xi / r)).collect();
        if eta.iter().all(|e| *e == 0.0) {
            return vec![0.0; k];
        }
        let q = self.profile.value(x);
        let dq = self.profile.gradient(x);
        (0..k)
            .map(|j| {
                let others: f64 = (0..k).filter(|&i| i != j).map(|i| eta[i]).product();
                let d_eta = bump_derivative(x[j] / self.radii[j]) / self.radii[j];
                (dq[j] * eta[j] + q * d_eta) * others
            })
            .collect()
    }

    pub fn eval(&self, u: &VelocityField) -> Result<f64> {
        Ok(self.profile_value(&self.coordinates(u)?))
    }

    /// Riesz representative of the Fréchet derivative, `sum_j d_j phi v_j`.
    pub fn grad(&self, u: &VelocityField) -> Result<TestField> {
        let g = self.profile_gradient(&self.coordinates(u)?);
        let mut acc = VelocityField::zeros(self.lattice());
        for (gj, v) in g.iter().zip(&self.fields) {
            if *gj != 0.0 {
                acc = acc.add_scaled(*gj, v)?;
            }
        }
        Ok(acc)
    }
}

pub fn cyl_eval(phi: &CylindricalTestFunction, u: &VelocityField) -> Result<f64> {
    phi.eval(u)
}

pub fn cyl_grad(phi: &CylindricalTestFunction, u: &VelocityField) -> Result<TestField> {
    phi.grad(u)
}

/// Unit-norm divergence-free field with Gaussian coefficients.
pub fn random_unit_field(lattice: &Arc<WaveLattice>, rng: &mut impl Rng) -> VelocityField {
    let mut raw = RawField::zeros(lattice);
    for c in raw.coeffs_mut() {
        let mut z: Coeff = [Complex64::new(0.0, 0.0); 3];
        for zi in z.iter_mut() {
            *zi = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
        *c = z;
    }
    let u = leray_project(&raw);
    let n = u.norm();
    u.scaled(1.0 / n)
}

/// Random family of `count` test functions with arities cycling through
/// `1..=max_arity`.
///
/// The test fields have unit norm, so `|(u, v_j)| <= |u|`; with
/// `support_radius >= 2 R` every state of norm `<= R` lies well inside the
/// support. Profiles get random `O(1)` coefficients.
pub fn random_cylindrical_family(
    lattice: &Arc<WaveLattice>,
    count: usize,
    max_arity: usize,
    support_radius: f64,
    rng: &mut impl Rng,
) -> Result<Vec<CylindricalTestFunction>> {
    if max_arity == 0 {
        return Err(Error::invalid("max_arity must be at least 1"));
    }
    (0..count)
        .map(|n| {
            let k = n % max_arity + 1;
            let fields = (0..k).map(|_| random_unit_field(lattice, rng)).collect();
            let scale = 1.0 / support_radius;
            let linear = (0..k).map(|_| rng.random_range(-1.0..1.0) * scale).collect();
            let mut quadratic = vec![vec![0.0; k]; k];
            for i in 0..k {
                for j in i..k {
                    let q = rng.random_range(-1.0..1.0) * scale * scale;
                    quadratic[i][j] = q;
                    quadratic[j][i] = q;
                }
            }
            let profile = QuadraticProfile {
                constant: rng.random_range(0.5..1.5),
                linear,
                quadratic,
            };
            CylindricalTestFunction::new(format!("phi{n}_k{k}"), fields, vec![support_radius; k], profile)
        })
        .collect()
}

pub fn expect_cyl(mu: &PhaseMeasure, phi: &CylindricalTestFunction) -> Result<f64> {
    let values = mu.atoms().iter().map(|u| phi.eval(u)).collect::<Result<Vec<_>>>()?;
    Ok(super::measures::ordered_sum(mu.weights(), values.into_iter()))
}

/// Per-function gaps `|int Phi d mu - int Phi d nu|`, in family order.
pub fn weak_star_gaps(mu: &PhaseMeasure, nu: &PhaseMeasure, family: &[CylindricalTestFunction]) -> Result<Vec<f64>> {
    if family.is_empty() {
        return Err(Error::Measure("weak-star gap needs a nonempty test family".into()));
    }
    if !mu.lattice().same_as(nu.lattice()) {
        return Err(Error::LatticeMismatch);
    }
    family
        .iter()
        .map(|phi| Ok((expect_cyl(mu, phi)? - expect_cyl(nu, phi)?).abs()))
        .collect()
}

/// Largest gap over the declared family; a lower bound for any weak-star distance.
pub fn weak_star_gap(mu: &PhaseMeasure, nu: &PhaseMeasure, family: &[CylindricalTestFunction]) -> Result<f64> {
    Ok(weak_star_gaps(mu, nu, family)?.into_iter().fold(0.0, f64::max))
}
