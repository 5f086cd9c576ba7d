//! Simplified-load motor model for pre-design cost-of-transport estimates.
//!
//! One leg cycle is sampled at uniform phase. The leg-angle joint sweeps
//! `α = A·cos(2πs)` with `A = atan(L / 2H)`; during stance it carries the
//! moment of half the body weight acting at the foot offset `H·tan α`, and
//! always the inertial torque of the swinging leg. The leg-length joint
//! shortens the leg during swing along a trapezoid (ramp, hold, ramp) while
//! pulling against the leg spring. Parallel-spring compression in stance is
//! ignored.

use std::f64::consts::TAU;
use std::fmt;
use std::io;

use super::energetics::{cost_of_transport, GRAVITY};
use super::motor::{available_torque, electrical_power, MotorSpec};
use super::{domain, ActuationError};

/// Fraction of the commanded stride that turns into body displacement.
pub const EFFECTIVE_STRIDE_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Joint {
    LegAngle,
    LegLength,
}

impl fmt::Display for Joint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Joint::LegAngle => "LA",
            Joint::LegLength => "LL",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SldmParams {
    /// Body mass carried by the legs (kg).
    pub mass: f64,
    /// Hip height in stance (m).
    pub stand_height: f64,
    /// Commanded stride (m).
    pub step_length: f64,
    /// Leg shortening during swing (m).
    pub lift_height: f64,
    pub duty_factor: f64,
    /// Leg plus reflected rotor inertia about the hip (kg·m²).
    pub leg_inertia: f64,
    /// Leg length at which the leg spring is relaxed (m).
    pub rest_length: f64,
    /// Effective leg spring stiffness seen by the LL cable (N/m).
    pub spring_stiffness: f64,
    /// Spring preload at rest length (N).
    pub spring_preload: f64,
    /// Cable pulley radius of the LL joint (m/rad).
    pub ll_lever: f64,
    pub gear_efficiency: f64,
    pub samples_per_cycle: usize,
}

impl Default for SldmParams {
    fn default() -> Self {
        Self {
            mass: 4.5,
            stand_height: 0.16,
            step_length: 0.14,
            lift_height: 0.04,
            duty_factor: 0.5,
            leg_inertia: 0.0085,
            rest_length: 0.18,
            spring_stiffness: 300.0,
            spring_preload: 7.0,
            ll_lever: 0.045,
            gear_efficiency: 0.85,
            samples_per_cycle: 400,
        }
    }
}

impl SldmParams {
    pub fn validate(&self) -> Result<(), ActuationError> {
        let positive = [
            ("mass", self.mass),
            ("stand height", self.stand_height),
            ("leg inertia", self.leg_inertia),
            ("LL lever", self.ll_lever),
            ("gear efficiency", self.gear_efficiency),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain(name, "> 0", v));
            }
        }
        if self.gear_efficiency > 1.0 {
            return Err(domain("gear efficiency", "<= 1", self.gear_efficiency));
        }
        if !(self.duty_factor > 0.0 && self.duty_factor < 1.0) {
            return Err(domain("duty factor", "in (0, 1)", self.duty_factor));
        }
        if !(self.lift_height >= 0.0 && self.lift_height < self.stand_height) {
            return Err(domain(
                "lift height",
                "in [0, stand height)",
                self.lift_height,
            ));
        }
        if !(self.step_length >= 0.0 && self.step_length.is_finite()) {
            return Err(domain("step length", ">= 0", self.step_length));
        }
        if !(self.spring_stiffness >= 0.0 && self.spring_preload >= 0.0) {
            return Err(ActuationError::Config(
                "spring parameters must be >= 0".into(),
            ));
        }
        if self.samples_per_cycle < 8 {
            return Err(ActuationError::Config(format!(
                "samples_per_cycle {} must be >= 8",
                self.samples_per_cycle
            )));
        }
        Ok(())
    }

    /// Cycle frequency giving `speed` under the trot stride relation.
    pub fn frequency_for_speed(&self, speed: f64, effective_stride_fraction: f64) -> f64 {
        speed / (2.0 * effective_stride_fraction * self.step_length)
    }
}

/// Joint loads at one phase sample. Torques in N·m, speeds in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadSample {
    /// Cycle phase in [0, 1).
    pub phase: f64,
    pub la_torque: f64,
    pub la_speed: f64,
    pub ll_torque: f64,
    pub ll_speed: f64,
}

/// One leg's loads over a uniformly sampled cycle; all four legs of the trot
/// see the same loads shifted in phase.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadScenario {
    pub frequency: f64,
    pub step_length: f64,
    pub mass: f64,
    pub gear_efficiency: f64,
    pub samples: Vec<LoadSample>,
}

impl LoadScenario {
    /// Trot loads at cycle `frequency` (Hz).
    pub fn trot(p: &SldmParams, frequency: f64) -> Result<Self, ActuationError> {
        p.validate()?;
        if !(frequency > 0.0 && frequency.is_finite()) {
            return Err(domain("frequency", "> 0", frequency));
        }
        let n = p.samples_per_cycle;
        let samples = (0..n)
            .map(|k| trot_sample(p, frequency, k as f64 / n as f64))
            .collect();
        Ok(Self {
            frequency,
            step_length: p.step_length,
            mass: p.mass,
            gear_efficiency: p.gear_efficiency,
            samples,
        })
    }

    /// Motionless scenario: no stride, no load.
    pub fn zero(p: &SldmParams, frequency: f64) -> Self {
        let n = p.samples_per_cycle.max(1);
        Self {
            frequency,
            step_length: 0.0,
            mass: p.mass,
            gear_efficiency: p.gear_efficiency,
            samples: (0..n)
                .map(|k| LoadSample {
                    phase: k as f64 / n as f64,
                    la_torque: 0.0,
                    la_speed: 0.0,
                    ll_torque: 0.0,
                    ll_speed: 0.0,
                })
                .collect(),
        }
    }
}

/// Closed-form loads at cycle phase `s ∈ [0, 1)`; stance first.
pub fn trot_sample(p: &SldmParams, frequency: f64, s: f64) -> LoadSample {
    let w = TAU * frequency;
    let amp = (0.5 * p.step_length / p.stand_height).atan();
    let (sin, cos) = (TAU * s).sin_cos();
    let alpha = amp * cos;
    let la_speed = -amp * w * sin;
    let la_accel = -amp * w * w * cos;
    let stance = s < p.duty_factor;
    // two legs share the weight in a trot stance
    let stance_force = 0.5 * p.mass * GRAVITY;
    let mut la_torque = p.leg_inertia * la_accel;
    if stance {
        // the motor holds against the weight moment about the hip
        la_torque -= stance_force * p.stand_height * alpha.tan();
    }

    let (length, length_rate) = if stance {
        (p.stand_height, 0.0)
    } else {
        let swing_time = (1.0 - p.duty_factor) / frequency;
        let u = (s - p.duty_factor) / (1.0 - p.duty_factor);
        let ramp_rate = p.lift_height / (swing_time / 3.0);
        if u < 1.0 / 3.0 {
            (p.stand_height - p.lift_height * 3.0 * u, -ramp_rate)
        } else if u < 2.0 / 3.0 {
            (p.stand_height - p.lift_height, 0.0)
        } else {
            (p.stand_height - p.lift_height * 3.0 * (1.0 - u), ramp_rate)
        }
    };
    let spring = p.spring_stiffness * (p.rest_length - length) + p.spring_preload;
    let cable = if stance {
        (spring - stance_force).max(0.0)
    } else {
        spring
    };
    LoadSample {
        phase: s,
        la_torque,
        la_speed,
        ll_torque: p.ll_lever * cable,
        ll_speed: -length_rate / p.ll_lever,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SldmEstimate {
    pub speed: f64,
    /// Mean electrical power of all eight LA/LL motors (W).
    pub power: f64,
    pub cot: f64,
}

/// Electrical power of one leg's two motors at a sample.
pub fn sample_power(
    sample: &LoadSample,
    la: &MotorSpec,
    ll: &MotorSpec,
    gear_efficiency: f64,
) -> f64 {
    electrical_power(sample.la_torque, sample.la_speed, la, gear_efficiency)
        + electrical_power(sample.ll_torque, sample.ll_speed, ll, gear_efficiency)
}

fn check_feasible(
    joint: Joint,
    phase: f64,
    torque: f64,
    speed: f64,
    spec: &MotorSpec,
) -> Result<(), ActuationError> {
    let avail = available_torque(speed, spec);
    if torque.abs() > avail.torque {
        return Err(ActuationError::Infeasible {
            joint,
            phase,
            demand: torque.abs(),
            available: avail.torque,
            speed,
        });
    }
    Ok(())
}

/// Mean electrical power, body speed and COT of a trot load scenario.
pub fn sldm_estimate(
    scenario: &LoadScenario,
    la: &MotorSpec,
    ll: &MotorSpec,
    effective_stride_fraction: f64,
) -> Result<SldmEstimate, ActuationError> {
    if scenario.samples.is_empty() {
        return Err(ActuationError::Config("scenario has no samples".into()));
    }
    let mut total = 0.0;
    for s in &scenario.samples {
        check_feasible(Joint::LegAngle, s.phase, s.la_torque, s.la_speed, la)?;
        check_feasible(Joint::LegLength, s.phase, s.ll_torque, s.ll_speed, ll)?;
        total += sample_power(s, la, ll, scenario.gear_efficiency);
    }
    let power = 4.0 * total / scenario.samples.len() as f64;
    let speed = 2.0 * effective_stride_fraction * scenario.step_length * scenario.frequency;
    if speed <= 0.0 {
        return Err(ActuationError::ZeroSpeed);
    }
    Ok(SldmEstimate {
        speed,
        power,
        cot: cost_of_transport(power, scenario.mass, speed)?,
    })
}

/// Estimates at each target speed, evaluated in parallel.
pub fn cot_sweep(
    p: &SldmParams,
    speeds: &[f64],
    la: &MotorSpec,
    ll: &MotorSpec,
) -> Result<Vec<SldmEstimate>, ActuationError> {
    use rayon::prelude::*;
    speeds
        .par_iter()
        .map(|&v| {
            if !(v > 0.0) {
                return Err(ActuationError::ZeroSpeed);
            }
            let f = p.frequency_for_speed(v, EFFECTIVE_STRIDE_FRACTION);
            let sc = LoadScenario::trot(p, f)?;
            sldm_estimate(&sc, la, ll, EFFECTIVE_STRIDE_FRACTION)
        })
        .collect()
}

pub fn write_cot_csv<W: io::Write>(out: W, rows: &[SldmEstimate]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["speed_mps", "power_W", "cot_J_per_Nm"])?;
    for r in rows {
        w.write_record([
            format!("{:.6}", r.speed),
            format!("{:.6}", r.power),
            format!("{:.6}", r.cot),
        ])?;
    }
    w.flush()?;
    Ok(())
}
