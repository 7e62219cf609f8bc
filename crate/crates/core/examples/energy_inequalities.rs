//! Energy inequality, strengthened inequalities for concave saturating psi,
//! the a-priori bound and the decay envelope along one forced trajectory.
//! The pass tolerance is calibrated from a step-halved re-integration.

use std::sync::Arc;

use nsestat::checks::*;
use nsestat::dynamics::{integrate, make_forcing, TimeGrid};
use nsestat::measure::random_unit_field;
use nsestat::spectral::{BoxParams, WaveLattice};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> nsestat::Result<()> {
    let nu = 0.1;
    let lat = Arc::new(WaveLattice::new(BoxParams::periodic_cube(nu, 2)?)?);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let grid = TimeGrid::with_steps(0.0, 0.99, 99)?;
    let u0 = random_unit_field(&lat, &mut rng).scaled(2.0);
    let f1 = random_unit_field(&lat, &mut rng);
    let f2 = random_unit_field(&lat, &mut rng).scaled(1.5);
    let f = make_forcing(grid.interval(), vec![(0.0, 0.5, f1), (0.5, 0.99, f2)])?;
    let coarse = integrate(&u0, &grid, nu, &f)?;
    let fine = integrate(&u0, &grid.refined(1), nu, &f)?;

    let linear = PsiFunction::Linear;
    let c = EnergyProfile::new(&coarse, nu, &f)?.ledger(linear);
    let d = EnergyProfile::new(&fine, nu, &f)?.ledger(linear);
    let (mut dc, mut df) = (Vec::new(), Vec::new());
    for i in 0..grid.len() {
        for j in i + 1..grid.len() {
            dc.push(c.rhs(i, j) - c.lhs(i, j));
            df.push(d.rhs(2 * i, 2 * j) - d.lhs(2 * i, 2 * j));
        }
    }
    let tol = RichardsonCalibration::from_pairs(grid.dt(), &dc, &df, c.scale()).tol();
    println!("calibrated tolerance {tol:.3e}");

    let psis = [PsiFunction::Saturating { a: 1.0 }, PsiFunction::Saturating { a: 10.0 }];
    let s = sweep_energy_checks(&coarse, nu, &f, lat.lambda1(), &psis, tol)?;
    println!("energy inequality: {}/{} pairs failed", s.energy.failures, s.energy.pairs);
    for (psi, x) in &s.strengthened {
        println!("strengthened ({}): {}/{} pairs failed", psi.label(), x.failures, x.pairs);
    }
    println!("a-priori bound: {}/{} failed", s.apriori.failures, s.apriori.pairs);
    println!("decay envelope: {}/{} failed", s.decay.failures, s.decay.pairs);
    println!("all passed: {}", s.passed());
    Ok(())
}
