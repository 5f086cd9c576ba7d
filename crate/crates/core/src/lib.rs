//! Locomotion control stack for a compliant quadruped: morphed-oscillator
//! CPG, virtual-leg kinematics, turning strategies, actuator and energetics
//! models, the SBCP bus protocol with a simulated half-duplex bus, a
//! kinematic gait simulator and a particle swarm optimizer.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod actuation;
pub mod cpg;
pub mod kinematics;
pub mod legs;
pub mod pso;
pub mod sbcp;
pub mod sim;
pub mod steering;

pub use actuation::{ActuationError, MotorSpec};
pub use cpg::{CpgError, OscillatorParams, OscillatorState, ShapeFunction};
pub use kinematics::{FootTarget, JointCommand, KinematicsError, LegGeometry, TrajectoryParams};
pub use legs::LegId;
pub use pso::{PsoError, SearchSpace, SwarmConfig};
pub use sbcp::{DecodeError, Frame, SbcpError};
pub use sim::{GaitProgram, GaitType, SimError, TrajectoryLog};
pub use steering::{SteeringError, TurnCommand, TurnStrategy};
