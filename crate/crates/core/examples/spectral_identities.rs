//! Algebraic identities of the truncated spectral operators on random fields:
//! skew-symmetry of the trilinear form, the Stokes pairing, Leray idempotence,
//! the Poincare inequality and agreement of the two nonlinear-term schemes.

use std::sync::Arc;

use nsestat::measure::random_unit_field;
use nsestat::spectral::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> nsestat::Result<()> {
    let lat = Arc::new(WaveLattice::new(BoxParams::periodic_cube(0.1, 3)?)?);
    println!("lattice: K = 3, {} half-lattice modes, lambda1 = {}", lat.len(), lat.lambda1());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let conv = Nonlinear::new(&lat, NonlinearScheme::Convolution);
    let pseudo = Nonlinear::new(&lat, NonlinearScheme::Pseudospectral);
    for n in 0..5 {
        let u = random_unit_field(&lat, &mut rng);
        let v = random_unit_field(&lat, &mut rng);
        let b = trilinear_b(&u, &v, &v)?;
        let pairing = l2_inner(&stokes_apply(&u), &v)? - v_inner(&u, &v)?;
        let p = leray_project(&u.clone().into_raw());
        let idem = p.max_rel_diff(&u)?;
        let poincare = u.enstrophy() / u.energy();
        let schemes = conv.apply(&u, &v)?.max_rel_diff(&pseudo.apply(&u, &v)?)?;
        println!(
            "pair {n}: b(u,v,v) = {b:+.2e}  <Au,v> - ((u,v)) = {pairing:+.2e}  |Pu - u| = {idem:.1e}  \
             ||u||^2/|u|^2 = {poincare:.3} >= {}  conv vs pseudo = {schemes:.1e}",
            lat.lambda1()
        );
    }
    Ok(())
}
