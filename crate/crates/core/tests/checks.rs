mod common;

use common::*;
use nsestat::checks::*;
use nsestat::dynamics::*;
use nsestat::spectral::{VelocityField, WaveLattice};
use std::sync::Arc;

fn decay_traj(lat: &Arc<WaveLattice>, k: [i32; 3], nu: f64, t1: f64, dt: f64) -> (Trajectory, ForcingSignal) {
    let u0 = VelocityField::eigenmode(lat, k, 0, 1.5).unwrap();
    let grid = TimeGrid::new(0.0, t1, dt).unwrap();
    let f = ForcingSignal::zero(lat, grid.interval());
    (integrate(&u0, &grid, nu, &f).unwrap(), f)
}

fn forced_random(seed: u64, dt: f64) -> (Trajectory, ForcingSignal, f64) {
    let nu = 0.1;
    let lat = cube(nu, 2);
    let mut r = rng(seed);
    let u0 = random_field(&lat, &mut r);
    let u0 = u0.scaled(3.0 / u0.norm());
    let iv = Interval::new(0.0, 1.0).unwrap();
    let f1 = VelocityField::eigenmode(&lat, [1, 0, 0], 0, 2.0).unwrap();
    let f2 = VelocityField::eigenmode(&lat, [0, 1, 1], 1, 1.0).unwrap();
    let f = make_forcing(iv, vec![(0.0, 0.5, f1), (0.5, 1.0, f2)]).unwrap();
    let grid = TimeGrid::new(0.0, 1.0, dt).unwrap();
    (integrate(&u0, &grid, nu, &f).unwrap(), f, nu)
}

#[test]
fn exact_decay_energy_defect_is_the_trapezoid_error() {
    let nu = 0.01;
    let lat = cube(nu, 2);
    let dt = 0.005;
    let (traj, f) = decay_traj(&lat, [1, 0, 0], nu, 1.0, dt);
    let rep = energy_inequality(&traj, 0.0, 1.0, nu, &f, 0.0).unwrap();
    // Closed form: trapezoid sum of e0 * r^n with r = exp(-2 nu lambda dt).
    let lam = 1.0;
    let e0 = traj.initial().energy();
    let r = (-2.0 * nu * lam * dt).exp();
    let n = 200;
    let trap = dt * 0.5 * (1.0 + r) * (1.0 - r.powi(n)) / (1.0 - r);
    let e1 = e0 * r.powi(n);
    let oracle = 0.5 * e0 - 0.5 * e1 - nu * lam * e0 * trap;
    assert!(rep.defect.abs() <= 1e-10, "{rep:?}");
    assert!((rep.defect - oracle).abs() <= 1e-13, "{} vs {oracle}", rep.defect);
    // The trapezoid rule overestimates the convex dissipation integral.
    assert!(rep.defect < 0.0);
    assert!(energy_inequality(&traj, 0.0, 1.0, nu, &f, 1e-10).unwrap().passed);
}

#[test]
fn steady_fixed_point_balances_exactly() {
    let nu = 0.1;
    let lat = cube(nu, 2);
    let w = VelocityField::eigenmode(&lat, [0, 1, 1], 1, 2.0).unwrap();
    let f = w.scaled(nu * 2.0);
    let grid = TimeGrid::new(0.0, 2.0, 0.05).unwrap();
    let forcing = ForcingSignal::steady(grid.interval(), f).unwrap();
    let traj = integrate(&w, &grid, nu, &forcing).unwrap();
    for (a, b) in [(0.0, 2.0), (0.5, 1.25), (1.0, 1.05)] {
        let rep = energy_inequality(&traj, a, b, nu, &forcing, 0.0).unwrap();
        assert!(rep.defect.abs() <= 1e-12, "{rep:?}");
        let ap = apriori_bound(&traj, a, b, nu, &forcing, 1.0, 0.0).unwrap();
        // |w| = 2 is below R0 = |f| / nu = 4: strict margin.
        assert!(ap.passed && ap.defect > 0.1 * (b - a), "{ap:?}");
    }
}

#[test]
fn galerkin_energy_defect_converges_at_second_order() {
    let dts = [0.02, 0.01, 0.005];
    let mut worst = Vec::new();
    let mut ledgers = Vec::new();
    for (lvl, &dt) in dts.iter().enumerate() {
        let (traj, f, nu) = forced_random(11, dt);
        let led = EnergyProfile::new(&traj, nu, &f).unwrap().ledger(PsiFunction::Linear);
        // Compare on the coarse nodes only.
        let stride = 1 << lvl;
        let idx: Vec<usize> = (0..led.len()).step_by(stride).collect();
        let mut d = Vec::new();
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                d.push(led.rhs(i, j) - led.lhs(i, j));
            }
        }
        worst.push(d.iter().fold(0.0f64, |m, x| m.max(x.abs())));
        ledgers.push(d);
    }
    let p1 = (worst[0] / worst[1]).log2();
    let p2 = (worst[1] / worst[2]).log2();
    assert!(p1 > 1.8 && p2 > 1.8, "orders {p1} {p2}: {worst:?}");

    let cal = RichardsonCalibration::from_pairs(dts[0], &ledgers[0], &ledgers[1], 10.0);
    let (traj, f, nu) = forced_random(11, dts[0]);
    let sweep = sweep_energy_checks(&traj, nu, &f, 1.0, &[PsiFunction::Saturating { a: 2.0 }], cal.tol()).unwrap();
    assert!(sweep.passed(), "{sweep:?}");
    assert!(sweep.energy.max_abs_defect <= cal.tol());
}

#[test]
fn linear_psi_matches_plain_energy_report() {
    let (traj, f, nu) = forced_random(3, 0.02);
    for (a, b) in [(0.0, 1.0), (0.24, 0.76), (0.5, 0.52)] {
        let plain = energy_inequality(&traj, a, b, nu, &f, 1e-6).unwrap();
        let strong = strengthened_energy_inequality(&traj, PsiFunction::Linear, a, b, nu, &f, 1e-6).unwrap();
        assert_eq!(plain.lhs, strong.lhs);
        assert_eq!(plain.rhs, strong.rhs);
        assert_eq!(plain.defect, strong.defect);
        assert_eq!(plain.passed, strong.passed);
        assert_eq!((plain.t_prime, plain.t, plain.tol), (strong.t_prime, strong.t, strong.tol));
    }
}

#[test]
fn saturating_psi_on_exact_decay_refines_to_zero() {
    let nu = 0.02;
    let lat = cube(nu, 2);
    let psi = PsiFunction::Saturating { a: 0.5 };
    let mut prev = f64::INFINITY;
    for dt in [0.01, 0.005, 0.0025] {
        let (traj, f) = decay_traj(&lat, [1, 0, 1], nu, 2.0, dt);
        let rep = strengthened_energy_inequality(&traj, psi, 0.0, 2.0, nu, &f, 1e-8).unwrap();
        assert!(rep.defect >= -1e-8, "{rep:?}");
        assert!(rep.defect.abs() < prev / 3.0);
        prev = rep.defect.abs();
    }
    assert!(prev < 1e-10);
}

#[test]
fn zero_trajectory_has_zero_sides() {
    let lat = cube(0.1, 1);
    let grid = TimeGrid::new(0.0, 1.0, 0.1).unwrap();
    let f = ForcingSignal::zero(&lat, grid.interval());
    let traj = integrate(&VelocityField::zeros(&lat), &grid, 0.1, &f).unwrap();
    for psi in [PsiFunction::Linear, PsiFunction::Saturating { a: 3.0 }] {
        let rep = strengthened_energy_inequality(&traj, psi, 0.2, 0.9, 0.1, &f, 0.0).unwrap();
        assert_eq!((rep.lhs, rep.rhs), (0.0, 0.0));
        assert!(rep.passed);
    }
}

#[test]
fn unforced_apriori_bound_is_monotone_decay() {
    let (traj, f, nu) = {
        let nu = 0.1;
        let lat = cube(nu, 2);
        let u0 = random_field(&lat, &mut rng(5));
        let grid = TimeGrid::new(0.0, 1.0, 0.01).unwrap();
        let f = ForcingSignal::zero(&lat, grid.interval());
        (integrate(&u0, &grid, nu, &f).unwrap(), f, nu)
    };
    let e = traj.energies();
    assert!(e.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    let rep = apriori_bound(&traj, 0.3, 0.8, nu, &f, 1.0, 1e-6).unwrap();
    assert!(rep.passed);
    // With f = 0 the right side is just |u(t')|^2.
    assert_eq!(rep.rhs, traj.sample_at(0.3).unwrap().energy());
}

#[test]
fn decay_envelope_margin_on_the_first_shell() {
    let nu = 0.1;
    let lat = cube(nu, 2);
    let (traj, f) = decay_traj(&lat, [0, 1, 0], nu, 1.0, 0.05);
    let rep = decay_envelope(&traj, 0.0, 1.0, nu, &f, lat.lambda1(), 0.0).unwrap();
    // |u|^2 decays at rate 2 nu lambda1 while the envelope decays at nu lambda1.
    let e0 = traj.initial().energy();
    let margin = e0 * ((-nu).exp() - (-2.0 * nu).exp());
    assert!((rep.defect - margin).abs() <= 1e-14, "{rep:?} vs {margin}");

    let (traj, f) = decay_traj(&lat, [1, 1, 1], nu, 1.0, 0.05);
    let rep = decay_envelope(&traj, 0.0, 1.0, nu, &f, lat.lambda1(), 0.0).unwrap();
    assert!(rep.passed && rep.defect > 0.1 * rep.rhs, "{rep:?}");
}

#[test]
fn decay_envelope_agrees_with_energy_inequality_unforced() {
    let nu = 0.1;
    let lat = cube(nu, 2);
    for k in [[1, 0, 0], [1, 1, 0], [2, 1, 0]] {
        let (traj, f) = decay_traj(&lat, k, nu, 1.0, 0.002);
        // Slack covers the trapezoid bias of the dissipation integral.
        let sweep = sweep_energy_checks(&traj, nu, &f, 1.0, &[], 1e-6).unwrap();
        assert_eq!(sweep.energy.passed(), sweep.decay.passed(), "{k:?}");
        assert!(sweep.decay.passed());
    }
}

#[test]
fn forced_random_trajectory_passes_every_decay_pair() {
    let (traj, f, nu) = forced_random(8, 0.01);
    let sweep = sweep_energy_checks(&traj, nu, &f, 1.0, &[], 1e-9).unwrap();
    assert!(sweep.decay.passed(), "{:?}", sweep.decay.worst);
    assert_eq!(sweep.decay.pairs, 101 * 100 / 2);
}

#[test]
fn r0_arithmetic() {
    let lat = cube(0.1, 1);
    let iv = Interval::new(0.0, 2.0).unwrap();
    assert_eq!(compute_r0(&ForcingSignal::zero(&lat, iv), 0.1, 1.0), 0.0);
    let e = |a| VelocityField::eigenmode(&lat, [1, 0, 0], 0, a).unwrap();
    let f = ForcingSignal::steady(iv, e(0.1)).unwrap();
    assert!((compute_r0(&f, 0.1, 1.0) - 1.0).abs() < 1e-15);
    let f = make_forcing(iv, vec![(0.0, 1.0, e(1.0)), (1.0, 2.0, e(3.0))]).unwrap();
    assert!((compute_r0(&f, 0.1, 1.0) - 30.0).abs() < 1e-12);
}

#[test]
fn ball_invariance_contract() {
    let nu = 0.1;
    let lat = cube(nu, 2);
    let grid = TimeGrid::new(0.0, 2.0, 0.02).unwrap();
    let u0 = random_field(&lat, &mut rng(2));
    let zero = ForcingSignal::zero(&lat, grid.interval());
    let traj = integrate(&u0, &grid, nu, &zero).unwrap();
    let rep = ball_invariance(&traj, &zero, nu, 1.0, u0.norm(), 1e-12).unwrap();
    assert!(rep.passed && rep.first_violation.is_none());

    // Steady mode at exactly R0.
    let r0 = 2.5;
    let fmode = VelocityField::eigenmode(&lat, [0, 0, 1], 0, nu * r0).unwrap();
    let f = ForcingSignal::steady(grid.interval(), fmode.clone()).unwrap();
    let ustar = fmode.scaled(1.0 / nu);
    let traj = integrate(&ustar, &grid, nu, &f).unwrap();
    let rep = ball_invariance(&traj, &f, nu, 1.0, compute_r0(&f, nu, 1.0), 1e-12).unwrap();
    assert!((rep.r0 - r0).abs() < 1e-12);
    assert!(rep.passed, "{rep:?}");

    assert!(matches!(ball_invariance(&traj, &f, nu, 1.0, 0.9 * r0, 1e-12), Err(nsestat::Error::Misuse(_))));
}

#[test]
fn ball_reports_first_violation() {
    let lat = cube(0.1, 1);
    let grid = TimeGrid::new(0.0, 1.0, 0.1).unwrap();
    let u = VelocityField::eigenmode(&lat, [1, 0, 0], 0, 1.0).unwrap();
    let traj = Trajectory::constant(grid, u, meta()).inject_energy_jump(0.3, 3.0).unwrap();
    let f = ForcingSignal::zero(&lat, grid.interval());
    let rep = ball_invariance(&traj, &f, 0.1, 1.0, 1.0, 1e-9).unwrap();
    assert!(!rep.passed);
    let (t, n) = rep.first_violation.unwrap();
    assert!((t - 0.1).abs() < 1e-12 && (n - 2.0).abs() < 1e-12);
}

#[test]
fn psi_of_exact_decay_matches_closed_form() {
    let nu = 0.05;
    let lat = cube(nu, 2);
    let dt = 0.001;
    let (traj, _) = decay_traj(&lat, [1, 0, 0], nu, 1.0, dt);
    let e0 = traj.initial().energy();
    let rate = 2.0 * nu;
    let target = -0.5 * rate * e0;
    let mut prev_gap = f64::INFINITY;
    for t in [1.0, 0.5, 0.25, 0.125] {
        let psi = psi_functional(&traj, t).unwrap();
        let exact = e0 * ((-(-rate * t).exp_m1()) / (rate * t) - 1.0);
        assert!(psi < 0.0);
        assert!((psi - exact).abs() <= 1e-6 * exact.abs(), "{psi} vs {exact}");
        assert!(psi >= -e0);
        // Psi / t tends to -rate e0 / 2.
        let gap = (psi / t - target).abs();
        assert!(gap < prev_gap);
        prev_gap = gap;
    }
    assert!(prev_gap < 0.02 * target.abs());
}

fn meta() -> TrajectoryMeta {
    TrajectoryMeta { solver: "manual".into(), viscosity: 0.1, synthetic: false }
}

#[test]
fn psi_vanishes_on_stationary_states() {
    let nu = 0.1;
    let lat = cube(nu, 2);
    let grid = TimeGrid::new(0.0, 1.0, 0.05).unwrap();
    let u = VelocityField::eigenmode(&lat, [1, 1, 0], 0, 1.0).unwrap();
    let traj = Trajectory::constant(grid, u.clone(), meta());
    let rep = strong_continuity_diagnostic(&traj, &dyadic_times(&grid, 0.8, 4).unwrap(), 1e-12).unwrap();
    assert!(rep.values.iter().all(|&v| v == 0.0));
    assert!(rep.consistent);

    let f = ForcingSignal::steady(grid.interval(), u.scaled(nu * 2.0)).unwrap();
    let traj = integrate(&u, &grid, nu, &f).unwrap();
    assert!(psi_functional(&traj, 0.5).unwrap().abs() < 1e-14);
    assert!(psi_functional(&traj, 0.0).is_err());
}

#[test]
fn smooth_trajectory_is_right_continuous() {
    let (traj, _, _) = forced_random(21, 0.0005);
    let times = dyadic_times(traj.grid(), 0.016, 6).unwrap();
    let rep = strong_continuity_diagnostic(&traj, &times, 1e-6).unwrap();
    assert!(rep.consistent, "{rep:?}");
    assert!(rep.min < 0.0);
}

#[test]
fn psi_limit_is_the_trapezoid_bias() {
    let dt = 0.01;
    let (traj, _, _) = forced_random(21, dt);
    let e = traj.energies();
    let e2 = (2.0 * e[0] - 5.0 * e[1] + 4.0 * e[2] - e[3]) / (dt * dt);
    let times = dyadic_times(traj.grid(), 0.32, 6).unwrap();
    let rep = strong_continuity_diagnostic(&traj, &times, 1e-6).unwrap();
    let bias = dt * dt * e2 / 12.0;
    assert!((rep.raw_limit - bias).abs() < 0.05 * bias.abs(), "{} vs {bias}", rep.raw_limit);
    // The step-doubling combination removes it.
    assert!(rep.limit.abs() < 0.01 * bias.abs(), "{rep:?}");
    assert!(rep.consistent);
}

#[test]
fn injected_jump_is_detected() {
    let nu = 0.1;
    let lat = cube(nu, 2);
    let grid = TimeGrid::new(0.0, 1.0, 0.01).unwrap();
    let u = VelocityField::eigenmode(&lat, [1, 0, 0], 1, 2.0).unwrap();
    let jump = 1.5;
    let traj = Trajectory::constant(grid, u, meta()).inject_energy_jump(0.64, jump).unwrap();
    assert!(traj.meta().synthetic);
    let times = dyadic_times(&grid, 0.64, 4).unwrap();
    let rep = strong_continuity_diagnostic(&traj, &times, 1e-6).unwrap();
    for (t, v) in rep.times.iter().zip(&rep.values) {
        let n = (t / 0.01).round();
        let exact = jump * (n - 0.5) / n;
        assert!((v - exact).abs() < 1e-12, "{v} vs {exact}");
    }
    assert!(!rep.consistent);
    assert!(rep.limit > 0.5 * jump, "{rep:?}");
    assert!((rep.min - jump).abs() < 0.1 * jump, "{rep:?}");
}

#[test]
fn diagnostic_input_errors() {
    let (traj, _, _) = forced_random(1, 0.02);
    assert!(strong_continuity_diagnostic(&traj, &[0.5, 0.25], 1e-6).is_err());
    assert!(strong_continuity_diagnostic(&traj, &[0.25, 0.5, 0.1], 1e-6).is_err());
    assert!(strong_continuity_diagnostic(&traj, &[0.5, 0.25, 0.123], 1e-6).is_err());
    assert!(energy_inequality(&traj, 0.5, 0.5, 0.1, &ForcingSignal::zero(traj.lattice(), traj.interval()), 0.0).is_err());
    assert!(energy_inequality(&traj, 0.1, 0.533, 0.1, &ForcingSignal::zero(traj.lattice(), traj.interval()), 0.0).is_err());
}

#[test]
fn extrapolation_recovers_polynomials() {
    let taus = [0.32, 0.16, 0.08, 0.04, 0.02];
    let ys: Vec<f64> = taus.iter().map(|t| 0.7 - 2.0 * t + 3.0 * t * t - t * t * t).collect();
    let (lim, slope) = extrapolate_to_zero(&taus, &ys).unwrap();
    assert!((lim - 0.7).abs() < 1e-12 && (slope + 2.0).abs() < 1e-10);
}

#[test]
fn reports_serialize_as_flat_rows() {
    let rep = InequalityReport::new(ENERGY_TAG, 0.0, 1.0, 1.0, 1.5, 1e-8);
    let v: serde_json::Value = serde_json::to_value(&rep).unwrap();
    for key in ["check", "t_prime", "t", "lhs", "rhs", "defect", "tol", "passed"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["defect"], 0.5);
}
