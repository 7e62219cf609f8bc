//! Spectral-Galerkin construction of statistical solutions of the 3D
//! periodic Navier-Stokes equations as weighted trajectory ensembles, with
//! verification batteries for the properties such ensembles must satisfy.
//!
//! Layers, bottom up:
//!
//! - [`spectral`]: the truncated divergence-free Fourier space, Stokes
//!   spectrum, inner products, Leray and Galerkin projectors, `B` and `b`.
//! - [`dynamics`]: integrating-factor RK4 for `u' + nu A u + B(u, u) = f`,
//!   trajectories and their restriction, sampling, pasting and weak-form
//!   residuals.
//! - [`checks`]: energy inequalities, decay envelopes, ball invariance and
//!   the strong-continuity functional for individual trajectories.
//! - [`measure`]: atomic phase-space and trajectory-space measures,
//!   cylindrical test functions, annuli decompositions, weak-star gaps.
//! - [`pipeline`]: ensemble construction from an initial measure and the
//!   statistical-solution battery (Liouville equation, mean energy
//!   inequalities, carrier and localization checks, convex approximation).
//! - [`io`]: experiment configs, samplers, file formats and the `run`,
//!   `verify` and `report` commands.
//!
//! Runnable walkthroughs live in `examples/`.

// Negated float comparisons are used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod measure;
pub mod pipeline;
pub mod spectral;

pub use error::{Error, Result};
