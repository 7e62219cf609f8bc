use super::forcing::ForcingSignal;
use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::spectral::{l2_inner_unchecked, v_inner_unchecked, Nonlinear, NonlinearScheme, TestField};

/// Weak-form residual of the functional equation tested against `v`:
///
/// `|(u(t), v) - (u(s), v) - int_s^t (f, v) - nu ((u, v)) - b(u, u, v) dtau|`,
///
/// with the time integral by the composite trapezoid rule on the nodes.
/// On each step the forcing of that step is used at both end nodes.
pub fn equation_residual(
    traj: &Trajectory,
    v: &TestField,
    s: f64,
    t: f64,
    nu: f64,
    forcing: &ForcingSignal,
) -> Result<f64> {
    traj.initial().check_lattice(v)?;
    let i = traj.index_of(s)?;
    let j = traj.index_of(t)?;
    if i >= j {
        return Err(Error::InvalidInterval(format!("need s < t, got s = {s}, t = {t}")));
    }
    let grid = traj.grid();
    let nl = Nonlinear::new(traj.lattice(), NonlinearScheme::Convolution);
    let states = traj.states();
    // node part without forcing: -nu ((u, v)) - b(u, u, v)
    let mut node = Vec::with_capacity(j - i + 1);
    for u in &states[i..=j] {
        let b = nl.apply(u, u)?;
        node.push(-nu * v_inner_unchecked(u, v) - l2_inner_unchecked(&b, v));
    }
    let dt = grid.dt();
    let mut integral = 0.0;
    for n in i..j {
        let f = forcing.on_step(grid.node(n), grid.node(n + 1));
        let fv = l2_inner_unchecked(f, v);
        integral += 0.5 * dt * (node[n - i] + node[n + 1 - i] + 2.0 * fv);
    }
    let lhs = l2_inner_unchecked(&states[j], v) - l2_inner_unchecked(&states[i], v);
    Ok((lhs - integral).abs())
}
