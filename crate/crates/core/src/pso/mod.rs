//! Particle swarm optimization over bounded boxes, plus the gait
//! distance objective.
//!
//! Each particle draws from its own ChaCha stream derived from the seed, and
//! objective values are gathered in particle order, so results do not
//! depend on the thread count.

mod gait;
mod swarm;

use thiserror::Error;

pub use gait::{gait_objective, GaitParam, GaitSearch};
pub use swarm::{
    optimize, optimize_from, write_trace_csv, Bound, InitialSwarm, PsoResult, SearchSpace, Sense,
    Swarm, SwarmConfig, TraceRow,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PsoError {
    #[error("invalid search space: {0}")]
    InvalidSpace(String),
    #[error("invalid swarm configuration: {0}")]
    InvalidConfig(String),
    #[error("initial swarm rows do not match particles x dimensions")]
    DimensionMismatch,
}
