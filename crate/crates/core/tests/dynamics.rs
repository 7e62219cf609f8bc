mod common;

use common::*;
use nsestat::dynamics::*;
use nsestat::spectral::*;

fn scaled_random(lat: &std::sync::Arc<WaveLattice>, seed: u64, norm: f64) -> VelocityField {
    let u = random_field(lat, &mut rng(seed));
    u.scaled(norm / u.norm())
}

fn order(e: &[f64]) -> Vec<f64> {
    e.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn beltrami_decay_matches_analytic_rate() {
    let nu = 0.05;
    let lat = cube(nu, 2);
    let u0 = VelocityField::abc(&lat, 1.0, 0.8, 0.6).unwrap();
    for dt in [0.1, 0.05] {
        let grid = TimeGrid::new(0.0, 4.0, dt).unwrap();
        let f = ForcingSignal::zero(&lat, grid.interval());
        let tr = integrate(&u0, &grid, nu, &f).unwrap();
        for (i, s) in tr.states().iter().enumerate() {
            let exact = u0.norm() * (-nu * grid.node(i)).exp();
            assert!(rel(s.norm(), exact) < 1e-8);
        }
    }
}

#[test]
fn perturbed_flow_self_converges_at_fourth_order() {
    let nu = 0.05;
    let lat = cube(nu, 2);
    let u0 = VelocityField::abc(&lat, 1.0, 0.8, 0.6)
        .unwrap()
        .add_scaled(1.0, &scaled_random(&lat, 3, 2.0))
        .unwrap();
    let finals: Vec<VelocityField> = (0..4)
        .map(|lvl| {
            let grid = TimeGrid::new(0.0, 1.0, 0.1).unwrap().refined(lvl);
            let f = ForcingSignal::zero(&lat, grid.interval());
            integrate(&u0, &grid, nu, &f).unwrap().last().clone()
        })
        .collect();
    let diffs: Vec<f64> = finals.windows(2).map(|w| w[0].sub(&w[1]).unwrap().norm()).collect();
    for p in order(&diffs) {
        assert!(p > 3.5, "observed order {p}, diffs {diffs:?}");
    }
}

#[test]
fn apply_and_pseudospectral_runs_agree() {
    let nu = 0.1;
    let lat = cube(nu, 2);
    let u0 = scaled_random(&lat, 5, 5.0);
    let grid = TimeGrid::new(0.0, 0.5, 0.05).unwrap();
    let f = ForcingSignal::zero(&lat, grid.interval());
    let a = GalerkinSystem::new(&lat, nu, NonlinearScheme::Convolution).unwrap().integrate(&u0, &grid, &f).unwrap();
    let b = GalerkinSystem::new(&lat, nu, NonlinearScheme::Pseudospectral).unwrap().integrate(&u0, &grid, &f).unwrap();
    assert!(a.last().max_rel_diff(b.last()).unwrap() < 1e-10);
}

#[test]
fn reruns_are_bit_identical() {
    let nu = 0.1;
    let lat = cube(nu, 2);
    let u0 = scaled_random(&lat, 7, 5.0);
    let grid = TimeGrid::new(0.0, 0.5, 0.01).unwrap();
    let force = VelocityField::eigenmode(&lat, [1, 0, 0], 0, 1.0).unwrap();
    let f = ForcingSignal::steady(grid.interval(), force).unwrap();
    let a = integrate(&u0, &grid, nu, &f).unwrap();
    let b = integrate(&u0, &grid, nu, &f).unwrap();
    assert_eq!(a.states(), b.states());
}

fn forced_setup(seed: u64) -> (std::sync::Arc<WaveLattice>, VelocityField, ForcingSignal, f64) {
    let nu = 0.1;
    let lat = cube(nu, 2);
    let u0 = scaled_random(&lat, seed, 5.0);
    let iv = Interval::new(0.0, 1.0).unwrap();
    let f1 = VelocityField::eigenmode(&lat, [1, 0, 0], 0, 2.0).unwrap();
    let f2 = VelocityField::eigenmode(&lat, [0, 1, 1], 1, 1.0).unwrap();
    let f = make_forcing(iv, vec![(0.0, 0.5, f1), (0.5, 1.0, f2)]).unwrap();
    (lat, u0, f, nu)
}

#[test]
fn weak_form_residual_converges_at_second_order() {
    let (lat, u0, f, nu) = forced_setup(9);
    let v = scaled_random(&lat, 10, 1.0);
    let mut res = Vec::new();
    for lvl in 0..3 {
        let grid = TimeGrid::new(0.0, 1.0, 0.05).unwrap().refined(lvl);
        let tr = integrate(&u0, &grid, nu, &f).unwrap();
        res.push(equation_residual(&tr, &v, 0.1, 0.9, nu, &f).unwrap());
    }
    for p in order(&res) {
        assert!(p > 1.9, "residuals {res:?}");
    }
}

#[test]
fn exact_decay_residual_is_quadrature_error() {
    let nu = 0.1;
    let lat = cube(nu, 2);
    let w = VelocityField::eigenmode(&lat, [1, 1, 0], 0, 1.0).unwrap();
    let mut res = Vec::new();
    for lvl in 0..3 {
        let grid = TimeGrid::new(0.0, 2.0, 0.1).unwrap().refined(lvl);
        let f = ForcingSignal::zero(&lat, grid.interval());
        let tr = integrate(&w, &grid, nu, &f).unwrap();
        res.push(equation_residual(&tr, &w, 0.0, 2.0, nu, &f).unwrap());
    }
    // (w, w) = 1: residual = |e^{-2 nu lam} - 1 + trapezoid of nu lam e^{-nu lam t}|
    let lam = 2.0;
    let dt = 0.1f64;
    let a = nu * lam;
    let exact_trap = {
        let n = 20;
        let vals: Vec<f64> = (0..=n).map(|i| a * (-a * i as f64 * dt).exp()).collect();
        trapezoid(&vals, dt)
    };
    let expect = ((-a * 2.0f64).exp() - 1.0 + exact_trap).abs();
    assert!(rel(res[0], expect) < 1e-9);
    for r in res.windows(2) {
        assert!((r[0] / r[1] - 4.0).abs() < 0.05);
    }
    let zero = Trajectory::constant(TimeGrid::new(0.0, 1.0, 0.1).unwrap(), VelocityField::zeros(&lat), TrajectoryMeta { solver: "none".into(), viscosity: nu, synthetic: false });
    let f0 = ForcingSignal::zero(&lat, Interval::new(0.0, 1.0).unwrap());
    assert_eq!(equation_residual(&zero, &w, 0.0, 1.0, nu, &f0).unwrap(), 0.0);
}

#[test]
fn discrete_energy_balance_converges() {
    let (_lat, u0, f, nu) = forced_setup(11);
    let mut defects = Vec::new();
    for lvl in 0..3 {
        let grid = TimeGrid::new(0.0, 1.0, 0.05).unwrap().refined(lvl);
        let tr = integrate(&u0, &grid, nu, &f).unwrap();
        let dt = grid.dt();
        let mut integral = 0.0;
        for n in 0..grid.steps() {
            let fs = f.on_step(grid.node(n), grid.node(n + 1));
            let g = |u: &VelocityField| nu * u.enstrophy() - l2_inner(fs, u).unwrap();
            integral += 0.5 * dt * (g(&tr.states()[n]) + g(&tr.states()[n + 1]));
        }
        defects.push((0.5 * tr.last().energy() - 0.5 * u0.energy() + integral).abs());
    }
    for p in order(&defects) {
        assert!(p > 1.9, "{defects:?}");
    }
}

#[test]
fn pasted_trajectory_passes_residual_across_junction() {
    let (lat, u0, f, nu) = forced_setup(13);
    let v = scaled_random(&lat, 14, 1.0);
    let mut res = Vec::new();
    for lvl in 0..3 {
        let grid = TimeGrid::new(0.0, 1.0, 0.05).unwrap().refined(lvl);
        let tr = integrate(&u0, &grid, nu, &f).unwrap();
        let left = tr.restrict(0.0, 0.5).unwrap();
        // restart the right half from the junction state
        let rgrid = TimeGrid::new(0.5, 1.0, grid.dt()).unwrap();
        let right = integrate(left.last(), &rgrid, nu, &f).unwrap();
        let p = paste(&left, &right).unwrap();
        assert_eq!(p.states(), tr.states());
        res.push(equation_residual(&p, &v, 0.3, 0.7, nu, &f).unwrap());
    }
    for r in order(&res) {
        assert!(r > 1.9, "{res:?}");
    }
}

#[test]
fn ball_confinement_with_steady_forcing() {
    let nu = 0.1;
    let lat = cube(nu, 2);
    let lam1 = lat.lambda1();
    let r0 = 5.0;
    let force = VelocityField::eigenmode(&lat, [0, 0, 1], 0, nu * lam1 * r0).unwrap();
    let grid = TimeGrid::new(0.0, 10.0, 0.02).unwrap();
    let f = ForcingSignal::steady(grid.interval(), force).unwrap();
    let u0 = scaled_random(&lat, 17, r0);
    let tr = integrate(&u0, &grid, nu, &f).unwrap();
    for s in tr.states() {
        assert!(s.norm() <= r0 * (1.0 + 1e-6));
    }
}
