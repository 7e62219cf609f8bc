mod common;

use common::*;
use nsestat::dynamics::*;
use nsestat::measure::*;
use nsestat::spectral::{l2_inner, VelocityField};
use rand::Rng;

fn atoms(n: usize, seed: u64, k: usize) -> Vec<VelocityField> {
    let lat = cube(0.1, k);
    let mut r = rng(seed);
    (0..n).map(|_| random_field(&lat, &mut r)).collect()
}

#[test]
fn weight_contract() {
    let a = atoms(2, 1, 1);
    let d = PhaseMeasure::dirac(a[0].clone());
    assert_eq!(d.weights(), &[1.0]);
    let m = make_phase_measure(a.clone(), vec![0.5, 0.5 + 1e-10]).unwrap();
    let s: f64 = m.weights().iter().sum();
    assert!((s - 1.0).abs() <= 1e-12);
    assert!(make_phase_measure(a.clone(), vec![1.1, -0.1]).is_err());
    assert!(make_phase_measure(a.clone(), vec![0.5, 0.6]).is_err());
    assert!(make_phase_measure(a.clone(), vec![1.0]).is_err());
    let other = atoms(1, 2, 2);
    assert!(make_phase_measure(vec![a[0].clone(), other[0].clone()], vec![0.5, 0.5]).is_err());
}

#[test]
fn expectation_arithmetic() {
    let lat = cube(0.1, 1);
    let u = VelocityField::eigenmode(&lat, [1, 0, 0], 0, 2f64.sqrt()).unwrap();
    let v = VelocityField::eigenmode(&lat, [0, 1, 0], 1, 2.0).unwrap();
    let mu = make_phase_measure(vec![u.clone(), v.clone()], vec![0.5, 0.5]).unwrap();
    assert!((expect(&mu, |_| 1.0) - 1.0).abs() < 1e-15);
    assert!((mean_energy(&mu) - 3.0).abs() < 1e-12);
    // Both modes sit on the first shell, lambda = 1.
    assert!((mean_enstrophy(&mu) - 3.0).abs() < 1e-12);
    let d = PhaseMeasure::dirac(u.clone());
    assert_eq!(mean_energy(&d), u.energy());
}

#[test]
fn trajectory_measure_marginals() {
    let nu = 0.1;
    let lat = cube(nu, 2);
    let grid = TimeGrid::new(0.0, 0.5, 0.05).unwrap();
    let f = ForcingSignal::zero(&lat, grid.interval());
    let mut r = rng(4);
    let u0s: Vec<_> = (0..3).map(|_| random_field(&lat, &mut r)).collect();
    let trajs: Vec<_> = u0s.iter().map(|u| integrate(u, &grid, nu, &f).unwrap()).collect();
    let w = vec![0.2, 0.3, 0.5];
    let rho = make_trajectory_measure(trajs.clone(), w.clone()).unwrap();
    let mu0 = make_phase_measure(u0s, w.clone()).unwrap();
    assert_eq!(project_at(&rho, 0.0).unwrap(), mu0);
    let fam = random_cylindrical_family(&lat, 3, 3, 20.0, &mut r).unwrap();
    let mu_t = project_at(&rho, 0.25).unwrap();
    for phi in &fam {
        let direct = w[0] * phi.eval(trajs[0].sample_at(0.25).unwrap()).unwrap()
            + w[1] * phi.eval(trajs[1].sample_at(0.25).unwrap()).unwrap()
            + w[2] * phi.eval(trajs[2].sample_at(0.25).unwrap()).unwrap();
        assert_eq!(expect_cyl(&mu_t, phi).unwrap(), direct);
    }
    assert!(project_at(&rho, 0.123).is_err());
    let dirac = make_trajectory_measure(vec![trajs[1].clone()], vec![1.0]).unwrap();
    assert_eq!(project_at(&dirac, 0.5).unwrap(), PhaseMeasure::dirac(trajs[1].last().clone()));

    let short = TimeGrid::new(0.0, 0.5, 0.1).unwrap();
    let other = integrate(trajs[0].initial(), &short, nu, &f).unwrap();
    assert!(make_trajectory_measure(vec![trajs[0].clone(), other], vec![0.5, 0.5]).is_err());
}

#[test]
fn galerkin_pushforward_converges() {
    let a = atoms(4, 9, 2);
    let lat = a[0].lattice().clone();
    let mu = PhaseMeasure::uniform(a).unwrap();
    let full = lat.len();
    assert_eq!(galerkin_pushforward(&mu, full).unwrap(), mu);
    assert!(galerkin_pushforward(&mu, full + 1).is_err());
    let fam = random_cylindrical_family(&lat, 4, 3, 10.0, &mut rng(3)).unwrap();
    let mut prev_energy = 0.0;
    let mut gaps = Vec::new();
    for (_, end) in lat.shells().iter().scan(0, |acc, &(l, c)| {
        *acc += c;
        Some((l, *acc))
    }) {
        let p = galerkin_pushforward(&mu, end).unwrap();
        assert!(mean_energy(&p) <= mean_energy(&mu) * (1.0 + 1e-14));
        assert!(mean_energy(&p) >= prev_energy);
        prev_energy = mean_energy(&p);
        gaps.push(weak_star_gap(&p, &mu, &fam).unwrap());
    }
    assert_eq!(*gaps.last().unwrap(), 0.0);
    assert!(gaps[0] > gaps[gaps.len() / 2]);
}

#[test]
fn cylindrical_examples() {
    let lat = cube(0.1, 2);
    let v1 = VelocityField::eigenmode(&lat, [1, 0, 0], 0, 1.0).unwrap();
    let v2 = VelocityField::eigenmode(&lat, [0, 1, 0], 0, 1.0).unwrap();
    let profile = QuadraticProfile {
        constant: 2.0,
        linear: vec![0.5, -1.0],
        quadratic: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
    };
    let phi = CylindricalTestFunction::new("t", vec![v1.clone(), v2.clone()], vec![3.0, 3.0], profile).unwrap();
    let u = VelocityField::eigenmode(&lat, [1, 1, 0], 0, 1.0).unwrap();
    assert_eq!(cyl_eval(&phi, &u).unwrap(), 2.0);
    let g = cyl_grad(&phi, &u).unwrap();
    // eta'(0) = 0, so the gradient at 0 is just q's gradient.
    let expect = v1.scaled(0.5).add_scaled(-1.0, &v2).unwrap();
    assert!(g.max_rel_diff(&expect).unwrap() < 1e-15);

    let far = v1.scaled(4.0).add_scaled(-4.0, &v2).unwrap();
    assert_eq!(cyl_eval(&phi, &far).unwrap(), 0.0);
    assert_eq!(cyl_grad(&phi, &far).unwrap().norm(), 0.0);

    assert!(CylindricalTestFunction::new("bad", vec![v1.clone()], vec![0.0], QuadraticProfile::constant(1, 1.0)).is_err());
    assert!(CylindricalTestFunction::new("bad", vec![v1], vec![1.0], QuadraticProfile::constant(2, 1.0)).is_err());
}

#[test]
fn gradient_matches_central_differences() {
    let lat = cube(0.1, 2);
    let mut r = rng(17);
    let fam = random_cylindrical_family(&lat, 6, 3, 3.0, &mut r).unwrap();
    let mut probes = 0;
    while probes < 100 {
        let phi = &fam[probes % fam.len()];
        let u = random_unit_field(&lat, &mut r).scaled(r.random_range(0.0..1.5));
        let w = random_unit_field(&lat, &mut r);
        let eps = 1e-5;
        let fd = (phi.eval(&u.add_scaled(eps, &w).unwrap()).unwrap() - phi.eval(&u.add_scaled(-eps, &w).unwrap()).unwrap())
            / (2.0 * eps);
        let an = l2_inner(&phi.grad(&u).unwrap(), &w).unwrap();
        assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0), "{fd} vs {an}");
        probes += 1;
    }
}

#[test]
fn family_separates_distinct_atoms() {
    let lat = cube(0.1, 2);
    let mut r = rng(23);
    let fam = random_cylindrical_family(&lat, 5, 3, 10.0, &mut r).unwrap();
    for _ in 0..50 {
        let u = random_unit_field(&lat, &mut r).scaled(r.random_range(0.0..3.0));
        let v = random_unit_field(&lat, &mut r).scaled(r.random_range(0.0..3.0));
        let sep = fam.iter().map(|p| (p.eval(&u).unwrap() - p.eval(&v).unwrap()).abs()).fold(0.0, f64::max);
        assert!(sep > 0.0);
    }
}

#[test]
fn psi_family_examples() {
    let lin = psi_family(PsiKind::Linear, 0.0).unwrap();
    assert_eq!((lin.value(4.0), lin.derivative(4.0)), (4.0, 1.0));
    let sat = psi_family(PsiKind::Saturating, 1.0).unwrap();
    assert_eq!((sat.value(0.0), sat.derivative(0.0)), (0.0, 1.0));
    assert!((sat.value(60.0) - 1.0).abs() < 1e-15);
    for a in [0.1, 1.0, 10.0] {
        let s = psi_family(PsiKind::Saturating, a).unwrap();
        for e in -40..40 {
            let x = 10f64.powf(e as f64 / 10.0);
            assert!(s.value(x) <= x.min(a));
        }
    }
    assert!(psi_family(PsiKind::Saturating, 0.0).is_err());
    assert!(psi_family(PsiKind::Saturating, -1.0).is_err());
}

#[test]
fn weak_star_gap_basics() {
    let a = atoms(2, 5, 2);
    let lat = a[0].lattice().clone();
    let fam = random_cylindrical_family(&lat, 4, 2, 10.0, &mut rng(6)).unwrap();
    let mu = PhaseMeasure::uniform(a.clone()).unwrap();
    assert_eq!(weak_star_gap(&mu, &mu, &fam).unwrap(), 0.0);
    assert!(weak_star_gap(&mu, &mu, &[]).is_err());
    // Linear in the weights: moving eps of mass changes every gap by eps |Phi(a0) - Phi(a1)|.
    let diffs: Vec<f64> = fam.iter().map(|p| (p.eval(&a[0]).unwrap() - p.eval(&a[1]).unwrap()).abs()).collect();
    for eps in [1e-2, 1e-3, 1e-4] {
        let nu = make_phase_measure(a.clone(), vec![0.5 + eps, 0.5 - eps]).unwrap();
        let gaps = weak_star_gaps(&mu, &nu, &fam).unwrap();
        for (g, d) in gaps.iter().zip(&diffs) {
            assert!((g - eps * d).abs() < 1e-12, "{g} vs {}", eps * d);
        }
    }
}

#[test]
fn annuli_bookkeeping() {
    let lat = cube(0.1, 2);
    let e = |a: f64| VelocityField::eigenmode(&lat, [1, 0, 0], 0, a).unwrap();
    let mu = make_phase_measure(vec![e(0.5), e(1.5)], vec![0.3, 0.7]).unwrap();
    let ladder = RadiiLadder::new(vec![1.0, 2.0]).unwrap();
    let parts = annuli_split(&mu, &ladder).unwrap();
    assert_eq!(parts.len(), 2);
    assert_eq!((parts[0].mass, parts[1].mass), (0.3, 0.7));
    assert_eq!(parts[0].measure.weights(), &[1.0]);
    let inside = annuli_split(&mu, &RadiiLadder::new(vec![2.0, 3.0]).unwrap()).unwrap();
    assert_eq!(inside.len(), 1);
    assert_eq!(inside[0].mass, 1.0);
    assert!(annuli_split(&mu, &RadiiLadder::new(vec![1.0]).unwrap()).is_err());
    assert!(RadiiLadder::new(vec![1.0, 1.0]).is_err());
    assert!(RadiiLadder::above_r0(vec![1.0, 2.0], 1.5).is_err());
}

#[test]
fn annuli_recombination_preserves_expectations() {
    let lat = cube(0.1, 2);
    let mut r = rng(31);
    let atoms: Vec<_> = (0..20).map(|_| random_unit_field(&lat, &mut r).scaled(r.random_range(0.1..4.0))).collect();
    let raw: Vec<f64> = (0..20).map(|_| r.random_range(0.1..1.0)).collect();
    let s: f64 = raw.iter().sum();
    let mu = make_phase_measure(atoms, raw.iter().map(|w| w / s).collect()).unwrap();
    let ladder = RadiiLadder::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
    let parts = annuli_split(&mu, &ladder).unwrap();
    let mass: f64 = parts.iter().map(|p| p.mass).sum();
    assert!((mass - 1.0).abs() < 1e-12);
    let back = recombine(&parts).unwrap();
    assert_eq!(back.atoms(), mu.atoms());
    let fam = random_cylindrical_family(&lat, 5, 3, 10.0, &mut r).unwrap();
    for phi in &fam {
        let a = expect_cyl(&mu, phi).unwrap();
        let b = mixture_expectation(&parts, |u| phi.eval(u).unwrap());
        let c = expect_cyl(&back, phi).unwrap();
        assert!((a - b).abs() < 1e-12 && (a - c).abs() < 1e-12);
    }
}
