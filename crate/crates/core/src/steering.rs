//! Turning strategies as pure modifiers of a [`GaitProgram`].
//!
//! * Adduction/abduction amplification: each AA oscillator tracks
//!   `a·sin(θ)` with `a = ±λ·ψ̇_des`, positive for front legs and negative
//!   for hind legs.
//! * Asymmetric stride length: per-leg step lengths are multiplied by an
//!   amplifier driven by the turning factor `ϖ ∈ [-1, 1]`.

use thiserror::Error;

use crate::legs::LegId;
use crate::sim::GaitProgram;

/// AA amplitude per unit desired yaw rate (rad·s). Maps 0.7 rad/s to
/// 0.05 rad.
pub const DEFAULT_AA_GAIN: f64 = 0.05 / 0.7;

/// Adduction/abduction joint limit (rad).
pub const AA_LIMIT: f64 = 8.0 * std::f64::consts::PI / 180.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SteeringError {
    #[error("turning factor {0} outside [-1, 1]")]
    TurningFactorOutOfRange(f64),
    #[error("non-finite turn command")]
    NonFinite,
}

/// Which side a positive turning factor shortens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TurnConvention {
    /// `ϖ > 0` shortens the right legs, turning the robot to the right.
    #[default]
    PositiveShortensRight,
    /// Mirror image: `ϖ > 0` shortens the left legs.
    PositiveShortensLeft,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TurnStrategy {
    /// Desired yaw rate (rad/s) and the amplitude gain λ (rad·s).
    AaAmp { yaw_rate: f64, gain: f64 },
    /// Turning factor ϖ.
    Asl { varpi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurnCommand {
    pub strategy: TurnStrategy,
    pub convention: TurnConvention,
}

impl TurnCommand {
    pub fn aa_amp(yaw_rate: f64) -> Self {
        Self {
            strategy: TurnStrategy::AaAmp {
                yaw_rate,
                gain: DEFAULT_AA_GAIN,
            },
            convention: TurnConvention::default(),
        }
    }

    pub fn asl(varpi: f64) -> Self {
        Self {
            strategy: TurnStrategy::Asl { varpi },
            convention: TurnConvention::default(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self.strategy {
            TurnStrategy::AaAmp { yaw_rate, gain } => yaw_rate * gain == 0.0,
            TurnStrategy::Asl { varpi } => varpi == 0.0,
        }
    }
}

/// Clamped AA setpoint; `clamped` records whether the joint limit was hit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AaSetpoint {
    pub value: f64,
    pub clamped: bool,
}

/// Signed AA amplitude for `leg`: front legs `+λψ̇`, hind legs `-λψ̇`.
pub fn aa_amplitude(yaw_rate: f64, leg: LegId, gain: f64) -> f64 {
    let sign = if leg.is_front() { 1.0 } else { -1.0 };
    sign * gain * yaw_rate
}

/// AA joint setpoint `a·sin(θ)`, clamped to the joint range.
pub fn aa_setpoint(theta: f64, yaw_rate: f64, leg: LegId, gain: f64) -> AaSetpoint {
    clamp_aa(aa_amplitude(yaw_rate, leg, gain) * theta.sin())
}

pub(crate) fn clamp_aa(raw: f64) -> AaSetpoint {
    let value = raw.clamp(-AA_LIMIT, AA_LIMIT);
    AaSetpoint {
        value,
        clamped: value != raw,
    }
}

/// Step-length amplifier for asymmetric-stride turning.
pub fn asl_amplifier(varpi: f64, leg: LegId) -> Result<f64, SteeringError> {
    asl_amplifier_with(varpi, leg, TurnConvention::default())
}

pub fn asl_amplifier_with(
    varpi: f64,
    leg: LegId,
    convention: TurnConvention,
) -> Result<f64, SteeringError> {
    if varpi.is_nan() || !(-1.0..=1.0).contains(&varpi) {
        return Err(SteeringError::TurningFactorOutOfRange(varpi));
    }
    let (varpi, left) = match convention {
        TurnConvention::PositiveShortensRight => (varpi, leg.is_left()),
        TurnConvention::PositiveShortensLeft => (varpi, !leg.is_left()),
    };
    Ok(if left && varpi < 0.0 {
        2.0 * varpi + 1.0
    } else if !left && varpi > 0.0 {
        1.0 - 2.0 * varpi
    } else {
        1.0
    })
}

/// Applies a turn command to a gait program. Zero-magnitude commands return
/// the program unchanged.
pub fn apply_turn(gait: &GaitProgram, cmd: &TurnCommand) -> Result<GaitProgram, SteeringError> {
    let mut out = gait.clone();
    match cmd.strategy {
        TurnStrategy::AaAmp { yaw_rate, gain } => {
            if !(yaw_rate.is_finite() && gain.is_finite()) {
                return Err(SteeringError::NonFinite);
            }
            if cmd.is_zero() {
                return Ok(out);
            }
            for leg in LegId::ALL {
                out.aa_amplitude[leg.index()] = aa_amplitude(yaw_rate, leg, gain);
            }
        }
        TurnStrategy::Asl { varpi } => {
            // validate even when zero so out-of-range input always errors
            asl_amplifier_with(varpi, LegId::LF, cmd.convention)?;
            if cmd.is_zero() {
                return Ok(out);
            }
            for leg in LegId::ALL {
                out.legs[leg.index()].step_length *=
                    asl_amplifier_with(varpi, leg, cmd.convention)?;
            }
        }
    }
    Ok(out)
}
