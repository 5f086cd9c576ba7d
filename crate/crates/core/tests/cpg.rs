use std::f64::consts::{PI, TAU};

use oncilla_core::cpg::{
    derivatives, encode_trajectory, integrate_step, make_gait_network, make_trot_network,
    FeedbackTerm, OscillatorParams, OscillatorState, ShapeFunction, DEFAULT_SHAPE_SAMPLES,
};
use oncilla_core::kinematics::{
    foot_trajectory, inverse_kinematics, LegGeometry, TrajectoryParams,
};
use oncilla_core::LegId;
use proptest::prelude::*;

fn wrap_pi(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(TAU) - PI;
    if y <= -PI {
        y + TAU
    } else {
        y
    }
}

fn run(mut s: OscillatorState, p: &OscillatorParams, dt: f64, steps: usize) -> OscillatorState {
    let fb = FeedbackTerm::zeros(p.len());
    for _ in 0..steps {
        s = integrate_step(&s, p, &fb, dt).unwrap();
    }
    s
}

fn pair_network(bias: f64) -> OscillatorParams {
    make_gait_network(1.0, &[0.0, -bias], 5.0).unwrap()
}

fn sine_node(gamma: f64) -> OscillatorParams {
    let shape = ShapeFunction::from_fn(DEFAULT_SHAPE_SAMPLES, |t| t.sin() + 0.25 * (2.0 * t).cos())
        .unwrap();
    OscillatorParams::uncoupled(TAU, gamma, vec![shape]).unwrap()
}

#[test]
fn two_node_lock_matches_fine_reference() {
    let p = pair_network(PI);
    let start = OscillatorState::new(vec![0.3, 2.0], vec![0.0, 0.0]);
    let coarse = run(start.clone(), &p, 1e-3, 10_000);
    let fine = run(start, &p, 1e-5, 1_000_000);
    let diff = |s: &OscillatorState| wrap_pi(s.theta[0] - s.theta[1] - PI);
    assert!(diff(&coarse).abs() < 1e-3);
    assert!((diff(&coarse) - diff(&fine)).abs() < 1e-9);
    assert!(wrap_pi(coarse.theta[0] - fine.theta[0]).abs() < 1e-9);
}

#[test]
fn rk4_radial_error_is_fourth_order() {
    // uncoupled node: θ is linear, so r(t) = f(θ) + (r0 − f(θ0))·e^{−γt}
    let gamma = 10.0;
    let p = sine_node(gamma);
    let theta0 = 0.4;
    let r0 = 1.5;
    let f = &p.shapes[0];
    let exact = |t: f64| f.value(theta0 + TAU * t) + (r0 - f.value(theta0)) * (-gamma * t).exp();
    let err = |dt: f64| {
        let n = (0.5 / dt).round() as usize;
        let s = run(OscillatorState::new(vec![theta0], vec![r0]), &p, dt, n);
        (s.r[0] - exact(0.5)).abs()
    };
    let (e1, e2) = (err(0.01), err(0.005));
    assert!(e1 / e2 >= 8.0, "ratio {}", e1 / e2);
    // phase is linear and integrates to round-off
    let s = run(OscillatorState::new(vec![theta0], vec![r0]), &p, 0.01, 25);
    assert!((s.theta[0] - (theta0 + TAU * 0.25)).abs() < 1e-12);
}

#[test]
fn quarter_period_step_is_exact() {
    let p = OscillatorParams::uncoupled(TAU, 1.0, vec![ShapeFunction::constant(0.0)]).unwrap();
    let s = integrate_step(
        &OscillatorState::new(vec![0.0], vec![0.0]),
        &p,
        &FeedbackTerm::zeros(1),
        0.25,
    );
    // dt beyond the 10 ms guard is refused rather than integrated
    assert!(s.is_err());
    let s = run(OscillatorState::new(vec![0.0], vec![0.0]), &p, 0.01, 25);
    assert!((s.theta[0] - PI / 2.0).abs() < 1e-12);
}

#[test]
fn trot_network_runs_at_omega() {
    let phases = LegId::ALL.map(LegId::trot_phase);
    let p = make_gait_network(3.5, &phases, 5.0).unwrap();
    let s = run(
        OscillatorState::new(vec![0.1, 1.0, 2.5, 4.0], vec![0.0; 4]),
        &p,
        1e-3,
        10_000,
    );
    let (rates, _) = derivatives(&s, &p, &FeedbackTerm::zeros(4)).unwrap();
    for r in rates {
        assert!((r - 7.0 * PI).abs() < 1e-6);
    }
}

#[test]
fn trot_layout_constants() {
    let p = make_trot_network(3.5, 3).unwrap();
    assert!((p.omega - 7.0 * PI).abs() < 1e-12);
    let node = |leg: LegId| leg.index() * 3;
    assert!((p.phase_bias.get(node(LegId::LF), node(LegId::RF)).abs() - PI).abs() < 1e-12);
    assert_eq!(p.phase_bias.get(node(LegId::LF), node(LegId::RH)), 0.0);
    for i in 0..12 {
        for j in 0..12 {
            assert_eq!(p.coupling.get(i, j), if i == j { 0.0 } else { 5.0 });
        }
    }
}

#[test]
fn same_inputs_same_sequence() {
    let p = make_trot_network(3.5, 3).unwrap();
    let start = OscillatorState::new((0..12).map(|k| k as f64 * 0.5).collect(), vec![0.0; 12]);
    assert_eq!(run(start.clone(), &p, 1e-3, 500), run(start, &p, 1e-3, 500));
}

#[test]
fn ik_trajectory_encodes_faithfully() {
    let traj = TrajectoryParams::default();
    let geom = LegGeometry::default();
    let la = |th: f64| {
        inverse_kinematics(foot_trajectory(th, &traj).unwrap(), &geom)
            .unwrap()
            .leg_angle
    };
    let n = DEFAULT_SHAPE_SAMPLES;
    let h = TAU / n as f64;
    let samples: Vec<f64> = (0..=n).map(|k| la(k as f64 * h)).collect();
    let shape = encode_trajectory(&samples).unwrap();
    for (k, s) in samples.iter().enumerate() {
        assert!((shape.value(k as f64 * h) - s).abs() < 1e-12);
    }
    // between samples, away from the touchdown and liftoff kinks
    let liftoff = TAU * traj.duty_factor;
    for k in 0..20_000 {
        let th = k as f64 * TAU / 20_000.0;
        if th.min(TAU - th) < 2.0 * h || (th - liftoff).abs() < 2.0 * h {
            continue;
        }
        assert!((shape.value(th) - la(th)).abs() < 1e-4, "phase {th}");
    }
}

#[test]
fn encoded_trajectory_drives_node() {
    let traj = TrajectoryParams::default();
    let la = |th: f64| {
        let f = foot_trajectory(th, &traj).unwrap();
        f.x.atan2(-f.z)
    };
    let n = DEFAULT_SHAPE_SAMPLES;
    let samples: Vec<f64> = (0..=n).map(|k| la(k as f64 * TAU / n as f64)).collect();
    let shape = encode_trajectory(&samples).unwrap();
    let p = OscillatorParams::uncoupled(7.0 * PI, 10.0, vec![shape.clone()]).unwrap();
    let s = run(OscillatorState::new(vec![0.0], vec![0.0]), &p, 1e-3, 2_000);
    // RK4 tracking error across the spline knots stays at the 1e-6 level
    assert!((s.r[0] - shape.value(s.theta[0])).abs() < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn radial_output_converges(r0 in -10.0f64..10.0, theta0 in 0.0f64..TAU) {
        let gamma = 10.0;
        let p = sine_node(gamma);
        let steps = (10.0 / gamma / 1e-3).round() as usize;
        let s = run(OscillatorState::new(vec![theta0], vec![r0]), &p, 1e-3, steps);
        let f = &p.shapes[0];
        // e^{-10}·|r0 − f| ≤ 4.7e-4, below 1e-3·max|f| for a shape of unit peak
        prop_assert!((s.r[0] - f.value(s.theta[0])).abs() < 1e-3 * f.max_abs());
    }

    #[test]
    fn pair_locks_to_bias(a in 0.0f64..TAU, b in 0.0f64..TAU, bias in -3.0f64..3.0) {
        let p = pair_network(bias);
        let s = run(OscillatorState::new(vec![a, b], vec![0.0; 2]), &p, 1e-3, 10_000);
        prop_assert!(wrap_pi(s.theta[0] - s.theta[1] - bias).abs() < 1e-3);
    }
}
