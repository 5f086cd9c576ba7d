//! Kinematic quasi-static quadruped simulator.
//!
//! The CPG drives the leg-angle, leg-length and AA joints of all four legs.
//! Stance feet are pinned to the ground (minus slip) and the trunk pose is
//! reconstructed from their motion in the hip frames.

mod contact;
mod log;
mod metrics;
mod simulate;

use std::f64::consts::PI;

use thiserror::Error;

use crate::cpg::CpgError;
use crate::kinematics::{KinematicsError, TrajectoryParams};
use crate::legs::LegId;

pub use contact::{commanded_stance, jaccard, synthetic_deflection};
pub use log::{BodyState, LogSample, TrajectoryLog};
pub use metrics::{
    metrics, turning_metrics, GaitMetrics, TurningMetrics, MIN_CYCLES, MIN_TURN_YAW,
};
pub use simulate::{simulate, simulate_with, SimOptions, AA_YAW_GAIN, HIP_X, HIP_Y};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid gait program: {0}")]
    InvalidProgram(String),
    #[error("time step {dt} s exceeds {max} s (at least 50 samples per cycle)")]
    StepTooLarge { dt: f64, max: f64 },
    #[error("{leg} left the workspace at t = {t:.4} s: {source}")]
    Workspace {
        t: f64,
        leg: LegId,
        source: KinematicsError,
    },
    #[error(transparent)]
    Cpg(#[from] CpgError),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error("log spans {cycles:.2} cycles, need at least {min}")]
    LogTooShort { cycles: f64, min: f64 },
    #[error("net yaw {yaw:.3e} rad is below the {min:.3} rad needed for turning metrics")]
    InsufficientYaw { yaw: f64, min: f64 },
    #[error("log format: {0}")]
    LogFormat(String),
}

/// Leg phase pattern.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum GaitType {
    /// Diagonal pairs in phase.
    #[default]
    Trot,
    /// Lateral pairs in phase.
    Pace,
    /// Front pair and hind pair in phase.
    Bound,
    /// Explicit hip phases (rad) in `LF, RF, LH, RH` order.
    Custom([f64; 4]),
}

impl GaitType {
    pub fn leg_phases(&self) -> [f64; 4] {
        match *self {
            GaitType::Trot => LegId::ALL.map(LegId::trot_phase),
            GaitType::Pace => LegId::ALL.map(|l| if l.is_left() { 0.0 } else { PI }),
            GaitType::Bound => LegId::ALL.map(|l| if l.is_front() { 0.0 } else { PI }),
            GaitType::Custom(p) => p,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaitProgram {
    /// Locomotion frequency (Hz).
    pub frequency: f64,
    /// Foot trajectory per leg, `LF, RF, LH, RH`.
    pub legs: [TrajectoryParams; 4],
    pub gait: GaitType,
    /// Signed AA oscillation amplitude per leg (rad); zero for straight gaits.
    pub aa_amplitude: [f64; 4],
    /// Fraction of stance-foot motion lost to slipping, in [0, 1].
    pub slip: f64,
}

impl Default for GaitProgram {
    fn default() -> Self {
        Self {
            frequency: 3.5,
            legs: [TrajectoryParams::default(); 4],
            gait: GaitType::Trot,
            aa_amplitude: [0.0; 4],
            slip: 0.0,
        }
    }
}

impl GaitProgram {
    /// Trot with identical foot trajectories on all legs.
    pub fn trot(frequency: f64, leg: TrajectoryParams) -> Self {
        Self {
            frequency,
            legs: [leg; 4],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.frequency > 0.0 && self.frequency.is_finite()) {
            return Err(SimError::InvalidProgram(format!(
                "frequency {} Hz must be > 0",
                self.frequency
            )));
        }
        if !(0.0..=1.0).contains(&self.slip) {
            return Err(SimError::InvalidProgram(format!(
                "slip {} outside [0, 1]",
                self.slip
            )));
        }
        for p in &self.legs {
            p.validate()?;
        }
        if self.aa_amplitude.iter().any(|a| !a.is_finite()) {
            return Err(SimError::InvalidProgram("non-finite AA amplitude".into()));
        }
        if let GaitType::Custom(p) = self.gait {
            if p.iter().any(|x| !x.is_finite()) {
                return Err(SimError::InvalidProgram("non-finite gait phase".into()));
            }
        }
        Ok(())
    }
}
