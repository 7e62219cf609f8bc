//! With steady forcing the ball of radius R0 = |f| / (nu lambda1) is
//! forward invariant. Atoms started on its boundary never leave it.

use std::sync::Arc;

use nsestat::checks::{ball_invariance, compute_r0};
use nsestat::dynamics::{integrate, ForcingSignal, TimeGrid};
use nsestat::io::rescale_to_radius;
use nsestat::measure::random_unit_field;
use nsestat::spectral::{BoxParams, VelocityField, WaveLattice};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> nsestat::Result<()> {
    let nu = 0.05;
    let lat = Arc::new(WaveLattice::new(BoxParams::periodic_cube(nu, 2)?)?);
    let grid = TimeGrid::new(0.0, 8.0, 0.02)?;
    let f = ForcingSignal::steady(grid.interval(), VelocityField::eigenmode(&lat, [0, 0, 1], 0, nu * 10.0)?)?;
    let r0 = compute_r0(&f, nu, lat.lambda1());
    println!("R0 = {r0}");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 0..8 {
        let u0 = rescale_to_radius(&random_unit_field(&lat, &mut rng), r0);
        let tr = integrate(&u0, &grid, nu, &f)?;
        let b = ball_invariance(&tr, &f, nu, lat.lambda1(), r0, 1e-6)?;
        println!(
            "atom {n}: max |u|/R0 = {:.10}, |u(T)|/R0 = {:.4}, invariant: {}",
            b.max_norm / r0,
            tr.last().norm() / r0,
            b.passed
        );
    }
    Ok(())
}
