//! Weak Liouville equation for random cylindrical test functions on an
//! ensemble. The residual shrinks at the fourth-order rate under halving.

use std::sync::Arc;

use nsestat::dynamics::{ForcingSignal, TimeGrid};
use nsestat::measure::{random_cylindrical_family, random_unit_field, PhaseMeasure};
use nsestat::pipeline::{construct_vf_measure, LiouvilleEvaluator, VFBuildConfig};
use nsestat::spectral::{BoxParams, VelocityField, WaveLattice};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> nsestat::Result<()> {
    let nu = 0.1;
    let lat = Arc::new(WaveLattice::new(BoxParams::periodic_cube(nu, 2)?)?);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let atoms: Vec<_> = (0..16).map(|_| random_unit_field(&lat, &mut rng).scaled(rng.random_range(0.2..1.0))).collect();
    let mu0 = PhaseMeasure::uniform(atoms)?;
    let family = random_cylindrical_family(&lat, 5, 3, 4.0, &mut rng)?;
    let base = TimeGrid::new(0.0, 1.0, 0.02)?;
    let f = ForcingSignal::steady(base.interval(), VelocityField::eigenmode(&lat, [0, 0, 1], 0, nu)?)?;
    let mut prev: Option<Vec<f64>> = None;
    for l in 0..4 {
        let grid = base.refined(l);
        let rho = construct_vf_measure(&mu0, &VFBuildConfig::new(grid, nu, f.clone()))?;
        let eval = LiouvilleEvaluator::new(&rho, nu, &f, Default::default())?;
        let nodes: Vec<usize> = (0..base.len()).map(|i| i << l).collect();
        let res = family
            .iter()
            .map(|phi| Ok(eval.series(phi)?.max_residual_on(&nodes)))
            .collect::<nsestat::Result<Vec<f64>>>()?;
        let cells: Vec<String> = match &prev {
            Some(p) => res.iter().zip(p).map(|(r, q)| format!("{r:.2e} (x{:.2})", q / r)).collect(),
            None => res.iter().map(|r| format!("{r:.2e}")).collect(),
        };
        println!("dt = {:.5}: {}", grid.dt(), cells.join("  "));
        prev = Some(res);
    }
    Ok(())
}
