//! Actuator and energetics models: linear torque-speed envelope, PID
//! position tracking, cost of transport, Froude number and the
//! simplified-load motor model used for pre-design COT estimates.

mod energetics;
mod motor;
mod pid;
mod sldm;

use thiserror::Error;

pub use energetics::{cost_of_transport, froude, GRAVITY, STANDBY_POWER_W};
pub use motor::{available_torque, electrical_power, AvailableTorque, MotorSpec};
pub use pid::{pid_step, velocity_profile, PidConfig, PidState, INTERNAL_LOOP_HZ, MAX_TRACKING_HZ};
pub use sldm::{
    cot_sweep, sample_power, sldm_estimate, trot_sample, write_cot_csv, Joint, LoadSample,
    LoadScenario, SldmEstimate, SldmParams, EFFECTIVE_STRIDE_FRACTION,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ActuationError {
    #[error("{quantity} must be {requirement}, got {value}")]
    Domain {
        quantity: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{joint} demand {demand:.3} N·m exceeds available {available:.3} N·m at phase {phase:.3} (speed {speed:.3} rad/s)")]
    Infeasible {
        joint: Joint,
        phase: f64,
        demand: f64,
        available: f64,
        speed: f64,
    },
    #[error("cost of transport undefined at zero speed")]
    ZeroSpeed,
}

pub(crate) fn domain(
    quantity: &'static str,
    requirement: &'static str,
    value: f64,
) -> ActuationError {
    ActuationError::Domain {
        quantity,
        requirement,
        value,
    }
}
