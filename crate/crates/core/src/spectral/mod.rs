//! Divergence-free Fourier representation on the periodic box.

mod field;
mod lattice;
mod nonlinear;
mod ops;

pub use field::{polarization_basis, Coeff, RawField, TestField, VelocityField, DIVERGENCE_TOL};
pub use lattice::{BoxParams, WaveLattice};
pub use nonlinear::{nonlinear_b, trilinear_b, Nonlinear, NonlinearScheme};
pub use ops::{
    dual_norm_vprime, galerkin_project, h1_norm, l2_inner, leray_project, stokes_apply, v_inner,
};

pub(crate) use ops::{l2_inner_unchecked, v_inner_unchecked};

/// Builds the sorted half-lattice for `params`.
pub fn build_lattice(params: BoxParams) -> crate::error::Result<WaveLattice> {
    WaveLattice::new(params)
}
