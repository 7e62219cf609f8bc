//! The weighted strong-continuity functional of an ensemble stays below its
//! bound at every sampled delta. Injecting an energy jump into one atom is
//! detected, and the excess matches weight times jump.

use std::sync::Arc;

use nsestat::checks::dyadic_times;
use nsestat::dynamics::{ForcingSignal, TimeGrid};
use nsestat::measure::{make_trajectory_measure, random_unit_field, PhaseMeasure};
use nsestat::pipeline::{carrier_check, construct_vf_measure, VFBuildConfig};
use nsestat::spectral::{BoxParams, VelocityField, WaveLattice};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> nsestat::Result<()> {
    let nu = 0.1;
    let lat = Arc::new(WaveLattice::new(BoxParams::periodic_cube(nu, 2)?)?);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let atoms: Vec<_> = (0..16).map(|_| random_unit_field(&lat, &mut rng).scaled(rng.random_range(0.2..1.0))).collect();
    let grid = TimeGrid::new(0.0, 0.2, 0.001)?;
    let f = ForcingSignal::steady(grid.interval(), VelocityField::eigenmode(&lat, [0, 0, 1], 0, nu)?)?;
    let rho = construct_vf_measure(&PhaseMeasure::uniform(atoms)?, &VFBuildConfig::new(grid, nu, f.clone()))?;
    let times = dyadic_times(&grid, 0.064, 7)?;
    let clean = carrier_check(&rho, &times, nu, &f, 1e-6, 1e-6)?;
    for ((t, p), b) in times.iter().zip(&clean.weighted_psi).zip(&clean.bounds) {
        println!("delta = {t:.3}: weighted psi {p:+.3e} <= bound {b:.3e}");
    }
    println!("clean ensemble: bound passed {}, consistent {}", clean.bound_passed, clean.consistent);

    let jump = 0.8;
    let mut tampered = rho.atoms().to_vec();
    tampered[3] = tampered[3].inject_energy_jump(0.1, jump)?;
    let bad_rho = make_trajectory_measure(tampered, rho.weights().to_vec())?;
    let bad = carrier_check(&bad_rho, &times, nu, &f, 1e-6, 1e-6)?;
    let flagged: Vec<usize> = (0..bad.atoms.len()).filter(|&j| !bad.atoms[j].consistent).collect();
    println!(
        "jump of {jump} on atom 3: consistent {}, flagged atoms {flagged:?}, excess {:.4} vs weight*jump {:.4}",
        bad.consistent,
        bad.weighted_psi[0] - clean.weighted_psi[0],
        rho.weights()[3] * jump
    );
    Ok(())
}
