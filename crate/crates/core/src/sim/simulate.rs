use std::f64::consts::FRAC_PI_2;

use super::log::{BodyState, LogSample, TrajectoryLog};
use super::{GaitProgram, SimError};
use crate::actuation::{electrical_power, MotorSpec, SldmParams, GRAVITY};
use crate::cpg::{
    derivatives, integrate_step, make_gait_network, FeedbackTerm, OscillatorParams,
    OscillatorState, ShapeFunction, DEFAULT_COUPLING, DEFAULT_SHAPE_SAMPLES, MAX_DT,
};
use crate::cpg::{wrap_pi, wrap_tau};
use crate::kinematics::{foot_trajectory_unchecked, JointCommand, LegGeometry};
use crate::legs::LegId;
use crate::steering::clamp_aa;

/// Fore-aft distance from the trunk centre to each hip (m).
pub const HIP_X: f64 = 0.115;
/// Lateral distance from the trunk centre to each AA axis (m).
pub const HIP_Y: f64 = 0.07;

/// Share of the geometric AA-induced yaw that reaches the trunk. Fixed so
/// that a 0.05 rad AA amplitude at 3.5 Hz turns a full circle in about 10 s.
pub const AA_YAW_GAIN: f64 = 0.645;

const JOINTS_PER_LEG: usize = 3;
const LA: usize = 0;
const LL: usize = 1;
const AA: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    pub geometry: LegGeometry,
    pub aa_yaw_gain: f64,
    /// Mass, leg spring and LL cable data for the quasi-static power estimate.
    pub load: SldmParams,
    pub la_motor: MotorSpec,
    pub ll_motor: MotorSpec,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            geometry: LegGeometry::default(),
            aa_yaw_gain: AA_YAW_GAIN,
            load: SldmParams::default(),
            la_motor: MotorSpec::leg_angle(),
            ll_motor: MotorSpec::leg_length(),
        }
    }
}

/// Runs the simulator with default options.
pub fn simulate(gait: &GaitProgram, duration: f64, dt: f64) -> Result<TrajectoryLog, SimError> {
    simulate_with(gait, duration, dt, &SimOptions::default())
}

fn build_network(gait: &GaitProgram) -> Result<OscillatorParams, SimError> {
    let leg_phases = gait.gait.leg_phases();
    let mut phases = Vec::with_capacity(4 * JOINTS_PER_LEG);
    for p in leg_phases {
        // AA leads by a quarter period so a·sin sweeps monotonically in stance
        phases.extend([p, p, p + FRAC_PI_2]);
    }
    let mut params = make_gait_network(gait.frequency, &phases, DEFAULT_COUPLING)?;
    for leg in LegId::ALL {
        let traj = gait.legs[leg.index()];
        let amp = gait.aa_amplitude[leg.index()];
        let base = leg.index() * JOINTS_PER_LEG;
        params.shapes[base + LA] = ShapeFunction::from_fn(DEFAULT_SHAPE_SAMPLES, |th| {
            let f = foot_trajectory_unchecked(th, &traj);
            f.x.atan2(-f.z)
        })?;
        params.shapes[base + LL] = ShapeFunction::from_fn(DEFAULT_SHAPE_SAMPLES, |th| {
            let f = foot_trajectory_unchecked(th, &traj);
            f.x.hypot(f.z)
        })?;
        params.shapes[base + AA] = if amp == 0.0 {
            ShapeFunction::constant(0.0)
        } else {
            ShapeFunction::from_fn(DEFAULT_SHAPE_SAMPLES, |th| clamp_aa(amp * th.sin()).value)?
        };
    }
    Ok(params)
}

fn joints_of(state: &OscillatorState) -> [JointCommand; 4] {
    LegId::ALL.map(|leg| {
        let b = leg.index() * JOINTS_PER_LEG;
        JointCommand::new(state.r[b + LA], state.r[b + LL], state.r[b + AA])
    })
}

fn leg_phase(theta: &[f64], leg: LegId) -> f64 {
    theta[leg.index() * JOINTS_PER_LEG + LA]
}

fn stance_flags(gait: &GaitProgram, theta: &[f64]) -> [bool; 4] {
    LegId::ALL.map(|leg| gait.legs[leg.index()].in_stance(leg_phase(theta, leg)))
}

fn mean(it: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = it.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Motor power from quasi-static joint torques and CPG joint rates.
fn power_estimate(
    joints: &[JointCommand; 4],
    rates: &[f64],
    contacts: &[bool; 4],
    opts: &SimOptions,
) -> f64 {
    let p = &opts.load;
    let n_stance = contacts.iter().filter(|&&c| c).count();
    let mut total = 0.0;
    for leg in LegId::ALL {
        let i = leg.index();
        let j = joints[i];
        let b = i * JOINTS_PER_LEG;
        let load = if contacts[i] {
            p.mass * GRAVITY / n_stance as f64
        } else {
            0.0
        };
        let x = j.leg_length * j.leg_angle.sin();
        let la_torque = -load * x;
        let tension = (p.spring_stiffness * (p.rest_length - j.leg_length) + p.spring_preload
            - load)
            .max(0.0);
        let ll_torque = p.ll_lever * tension;
        let ll_speed = -rates[b + LL] / p.ll_lever;
        total += electrical_power(la_torque, rates[b + LA], &opts.la_motor, p.gear_efficiency)
            + electrical_power(ll_torque, ll_speed, &opts.ll_motor, p.gear_efficiency);
    }
    total
}

/// Simulates `duration` seconds at step `dt`, logging every step.
pub fn simulate_with(
    gait: &GaitProgram,
    duration: f64,
    dt: f64,
    opts: &SimOptions,
) -> Result<TrajectoryLog, SimError> {
    gait.validate()?;
    opts.geometry.validate()?;
    let max_dt = 1.0 / (50.0 * gait.frequency);
    if !(dt > 0.0) || dt > max_dt * (1.0 + 1e-12) {
        return Err(SimError::StepTooLarge { dt, max: max_dt });
    }
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(SimError::InvalidProgram(format!(
            "duration {duration} s must be >= 0"
        )));
    }

    let params = build_network(gait)?;
    let n_nodes = params.len();
    let initial: Vec<f64> = gait
        .gait
        .leg_phases()
        .iter()
        .flat_map(|&p| [p, p, p + FRAC_PI_2])
        .map(wrap_tau)
        .collect();
    let mut state = OscillatorState::on_limit_cycle(initial, &params);
    let fb = FeedbackTerm::zeros(n_nodes);
    let substeps = (dt / MAX_DT).ceil().max(1.0) as usize;
    let h = dt / substeps as f64;
    let steps = (duration / dt).round() as usize;
    let keep = 1.0 - gait.slip;

    let mut samples = Vec::with_capacity(steps + 1);
    let mut pose = (0.0, 0.0, 0.0);
    let mut hip_height = mean(gait.legs.iter().map(|p| p.stand_height)).unwrap_or(0.0);

    for k in 0..=steps {
        let t = k as f64 * dt;
        let joints = joints_of(&state);
        for leg in LegId::ALL {
            joints[leg.index()]
                .check(&opts.geometry)
                .map_err(|source| SimError::Workspace { t, leg, source })?;
        }
        let contacts = stance_flags(gait, &state.theta);
        let probe = LogSample {
            t,
            body: BodyState {
                x: pose.0,
                y: pose.1,
                yaw: pose.2,
                hip_height,
                contacts,
            },
            joints,
            power: 0.0,
        };
        if let Some(h) = mean(
            LegId::ALL
                .iter()
                .filter(|l| contacts[l.index()])
                .map(|&l| -probe.foot_in_hip(l)[2]),
        ) {
            hip_height = h;
        }
        let (_, rates) = derivatives(&state, &params, &fb)?;
        samples.push(LogSample {
            body: BodyState {
                hip_height,
                ..probe.body
            },
            power: power_estimate(&joints, &rates, &contacts, opts),
            ..probe
        });
        if k == steps {
            break;
        }

        let mut next = state.clone();
        for _ in 0..substeps {
            next = integrate_step(&next, &params, &fb, h)?;
        }
        let mid: Vec<f64> = state
            .theta
            .iter()
            .zip(&next.theta)
            .map(|(a, b)| a + 0.5 * wrap_pi(b - a))
            .collect();
        let stance = stance_flags(gait, &mid);
        let after = LogSample {
            joints: joints_of(&next),
            ..probe
        };
        let delta = LegId::ALL.map(|leg| {
            let a = probe.foot_in_hip(leg);
            let b = after.foot_in_hip(leg);
            (b[0] - a[0], b[1] - a[1])
        });
        let pick = |pred: fn(LegId) -> bool, f: fn((f64, f64)) -> f64| {
            mean(
                LegId::ALL
                    .iter()
                    .filter(|l| stance[l.index()] && pred(**l))
                    .map(|l| f(delta[l.index()])),
            )
        };
        let any = |_: LegId| true;
        if let (Some(dx), Some(dy)) = (pick(any, |d| d.0), pick(any, |d| d.1)) {
            let mut dyaw = 0.0;
            if let (Some(l), Some(r)) = (
                pick(LegId::is_left, |d| d.0),
                pick(|l| !l.is_left(), |d| d.0),
            ) {
                dyaw += (l - r) / (2.0 * HIP_Y);
            }
            if let (Some(f), Some(hd)) = (
                pick(LegId::is_front, |d| d.1),
                pick(|l| !l.is_front(), |d| d.1),
            ) {
                dyaw += opts.aa_yaw_gain * (hd - f) / (2.0 * HIP_X);
            }
            let (fwd, lat, dyaw) = (-dx * keep, -dy * keep, dyaw * keep);
            let (s, c) = (pose.2 + 0.5 * dyaw).sin_cos();
            pose.0 += c * fwd - s * lat;
            pose.1 += s * fwd + c * lat;
            pose.2 += dyaw;
        }
        state = next;
    }

    Ok(TrajectoryLog {
        frequency: gait.frequency,
        dt,
        samples,
    })
}
