use std::f64::consts::TAU;

use oncilla_core::kinematics::{
    contact_from_deflection, TrajectoryParams, DEFAULT_CONTACT_THRESHOLD,
};
use oncilla_core::sim::{
    commanded_stance, jaccard, metrics, simulate, synthetic_deflection, turning_metrics,
    GaitProgram, GaitType, SimError, TrajectoryLog,
};
use oncilla_core::steering::{apply_turn, TurnCommand};
use oncilla_core::LegId;
use proptest::prelude::*;

fn trot(step: f64) -> GaitProgram {
    GaitProgram::trot(
        3.5,
        TrajectoryParams {
            step_length: step,
            ..TrajectoryParams::default()
        },
    )
}

fn net_displacement(log: &TrajectoryLog) -> f64 {
    let (a, b) = (&log.samples[0].body, &log.samples.last().unwrap().body);
    (b.x - a.x).hypot(b.y - a.y)
}

#[test]
fn zero_step_length_stays_put() {
    let log = simulate(&trot(0.0), 3.0, 1e-3).unwrap();
    assert!(log
        .samples
        .iter()
        .all(|s| s.body.x == 0.0 && s.body.y == 0.0));
}

#[test]
fn default_trot_speed() {
    let m = metrics(&simulate(&trot(0.12), 5.0, 1e-3).unwrap()).unwrap();
    assert!((m.speed_avg - 0.84).abs() / 0.84 < 0.01, "{}", m.speed_avg);
    assert!((m.speed_avg - 2.0 * m.stride_effective * 3.5).abs() / m.speed_avg < 0.02);
    assert!(m.speed_peak >= m.speed_avg);
}

#[test]
fn measured_duty_matches_command() {
    let log = simulate(&trot(0.12), 4.0, 1e-3).unwrap();
    let m = metrics(&log).unwrap();
    let one_sample = log.dt * log.frequency;
    for d in m.duty_factor {
        assert!((d - 0.49).abs() <= one_sample + 1e-12, "duty {d}");
    }
}

#[test]
fn slip_halves_speed() {
    let mut slipping = trot(0.12);
    slipping.slip = 0.5;
    let a = metrics(&simulate(&trot(0.12), 4.0, 1e-3).unwrap()).unwrap();
    let b = metrics(&simulate(&slipping, 4.0, 1e-3).unwrap()).unwrap();
    assert!((b.speed_avg / a.speed_avg - 0.5).abs() < 1e-12);
}

#[test]
fn symmetric_gait_keeps_heading() {
    let log = simulate(&trot(0.12), 10.0 / 3.5, 1e-3).unwrap();
    assert!(log.samples.iter().all(|s| s.body.yaw.abs() < 1e-3));
    assert!(log.samples.iter().all(|s| s.body.y.abs() < 1e-6));
}

#[test]
fn body_velocity_is_cycle_periodic() {
    let per_cycle = 280;
    let log = simulate(&trot(0.1), 8.0 / 3.5, 1.0 / (3.5 * per_cycle as f64)).unwrap();
    let means: Vec<f64> = (2..8)
        .map(|c| {
            let a = &log.samples[c * per_cycle].body;
            let b = &log.samples[(c + 1) * per_cycle].body;
            (b.x - a.x) * 3.5
        })
        .collect();
    for w in means.windows(2) {
        assert!((w[1] - w[0]).abs() / w[0] < 0.01);
    }
}

#[test]
fn vertical_oscillation_matches_stance_geometry() {
    // The stance foot runs on z = −H, so l·cos α = H and the hip height is
    // H·cos(aa). AA follows a·cos(leg phase), so over stance the height spans
    // H·cos a (touchdown) to H (quarter cycle).
    let h = TrajectoryParams::default().stand_height;
    let m = metrics(&simulate(&trot(0.12), 4.0, 1e-3).unwrap()).unwrap();
    assert!(m.com_vertical_oscillation < 1e-5);
    let a = 0.1;
    let mut g = trot(0.12);
    g.aa_amplitude = [a; 4];
    let m = metrics(&simulate(&g, 4.0, 1e-3).unwrap()).unwrap();
    let predicted = 0.5 * h * (1.0 - a.cos());
    assert!(
        (m.com_vertical_oscillation - predicted).abs() < 0.02 * predicted,
        "{} vs {predicted}",
        m.com_vertical_oscillation
    );
}

#[test]
fn deflection_contacts_track_commanded_stance() {
    let log = simulate(&trot(0.12), 4.0, 1e-3).unwrap();
    for leg in LegId::ALL {
        let (knee, ankle) = synthetic_deflection(&log, leg, 0.1);
        let est = contact_from_deflection(&knee, &ankle, DEFAULT_CONTACT_THRESHOLD, 1.0).unwrap();
        let j = jaccard(&est.stance, &commanded_stance(&log, leg));
        assert!(j >= 0.8, "{leg:?}: {j}");
    }
}

#[test]
fn step_guard() {
    let err = simulate(&trot(0.12), 1.0, 0.01).unwrap_err();
    assert!(matches!(err, SimError::StepTooLarge { .. }));
    assert!(simulate(&trot(0.12), 1.0, 1.0 / (50.0 * 3.5)).is_ok());
}

#[test]
fn workspace_violation_names_leg_and_time() {
    let mut g = trot(0.12);
    g.legs[LegId::RH.index()].step_length = 0.5;
    match simulate(&g, 1.0, 1e-3).unwrap_err() {
        SimError::Workspace { leg, t, .. } => {
            assert_eq!(leg, LegId::RH);
            assert!(t >= 0.0);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn metrics_need_four_cycles() {
    let log = simulate(&trot(0.12), 3.0 / 3.5, 1e-3).unwrap();
    assert!(matches!(metrics(&log), Err(SimError::LogTooShort { .. })));
}

#[test]
fn straight_gait_has_no_turn() {
    let g = apply_turn(&trot(0.12), &TurnCommand::asl(0.0)).unwrap();
    let log = simulate(&g, 3.0, 1e-3).unwrap();
    assert!(log.samples.last().unwrap().body.yaw.abs() < 1e-6);
    assert!(matches!(
        turning_metrics(&log),
        Err(SimError::InsufficientYaw { .. })
    ));
}

#[test]
fn turning_on_the_spot() {
    let g = apply_turn(&trot(0.0), &TurnCommand::aa_amp(0.7)).unwrap();
    let tm = turning_metrics(&simulate(&g, 12.0, 1e-3).unwrap()).unwrap();
    assert!(tm.radius < 1e-6);
    assert!(
        (tm.time_full_turn - 10.0).abs() < 0.5,
        "{}",
        tm.time_full_turn
    );
}

#[test]
fn pivot_turn_radius() {
    let g = apply_turn(&trot(0.4 / 7.0), &TurnCommand::asl(1.0)).unwrap();
    let tm = turning_metrics(&simulate(&g, 12.0, 1e-3).unwrap()).unwrap();
    assert!(tm.radius < 0.05);
    assert!(tm.yaw_change.abs() > TAU);
}

#[test]
fn pace_and_bound_run() {
    for gait in [GaitType::Pace, GaitType::Bound] {
        let g = GaitProgram { gait, ..trot(0.1) };
        let log = simulate(&g, 2.0, 1e-3).unwrap();
        assert!(net_displacement(&log) > 0.0);
    }
}

#[test]
fn csv_round_trip() {
    let log = simulate(&trot(0.12), 0.5, 1e-3).unwrap();
    let mut buf = Vec::new();
    log.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with(
        "t_s,x_m,y_m,yaw_rad,hip_height_m,LF_angle_rad,LF_length_m,LF_aa_rad,LF_contact"
    ));
    assert!(header.ends_with(",power_W"));
    let back = TrajectoryLog::read_csv(buf.as_slice(), 3.5).unwrap();
    assert_eq!(back.samples.len(), log.samples.len());
    let mut again = Vec::new();
    back.write_csv(&mut again).unwrap();
    assert_eq!(again, buf);
}

#[test]
fn logs_are_deterministic() {
    let a = simulate(&trot(0.1), 1.0, 2e-3).unwrap();
    let b = simulate(&trot(0.1), 1.0, 2e-3).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn speed_follows_stride_and_frequency(step in 0.03f64..0.13, f in 2.0f64..4.0) {
        let g = GaitProgram::trot(f, TrajectoryParams { step_length: step, ..TrajectoryParams::default() });
        let log = simulate(&g, 4.0 / f, 1.0 / (200.0 * f)).unwrap();
        let m = metrics(&log).unwrap();
        prop_assert!((m.speed_avg - 2.0 * step * f).abs() / (2.0 * step * f) < 0.02);
    }

    #[test]
    fn slip_scales_linearly(slip in 0.0f64..1.0) {
        let mut g = trot(0.1);
        let base = net_displacement(&simulate(&g, 0.5, 2e-3).unwrap());
        g.slip = slip;
        let d = net_displacement(&simulate(&g, 0.5, 2e-3).unwrap());
        prop_assert!((d - (1.0 - slip) * base).abs() < 1e-9);
    }
}
