//! A single Stokes eigenmode is an exact steady-shape solution that decays
//! like exp(-nu lambda t). The integrator reproduces it to round-off.

use std::sync::Arc;

use nsestat::dynamics::{integrate, ForcingSignal, TimeGrid};
use nsestat::spectral::{BoxParams, VelocityField, WaveLattice};

fn main() -> nsestat::Result<()> {
    let nu = 0.1;
    let lat = Arc::new(WaveLattice::new(BoxParams::periodic_cube(nu, 2)?)?);
    let grid = TimeGrid::new(0.0, 2.0, 0.1)?;
    let zero = ForcingSignal::zero(&lat, grid.interval());
    for k in [[1, 0, 0], [1, 1, 0], [2, 1, 1]] {
        let u0 = VelocityField::eigenmode(&lat, k, 0, 1.0)?;
        let lambda = lat.eigenvalues()[lat.locate(k).unwrap().0];
        let tr = integrate(&u0, &grid, nu, &zero)?;
        let worst = tr
            .states()
            .iter()
            .enumerate()
            .map(|(i, s)| s.max_rel_diff(&u0.scaled((-nu * lambda * grid.node(i)).exp())).unwrap())
            .fold(0.0f64, f64::max);
        println!(
            "k = {k:?} lambda = {lambda}: |u(T)|^2 = {:.12} exact {:.12}, max rel err {worst:.1e}",
            tr.last().energy(),
            u0.energy() * (-2.0 * nu * lambda * grid.t1()).exp()
        );
    }
    Ok(())
}
