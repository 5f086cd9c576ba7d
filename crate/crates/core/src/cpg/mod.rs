//! Morphed-oscillator central pattern generator.
//!
//! Each node `i` carries a phase `θ_i` and a radial output `r_i`. The phase
//! advances at the coupled rate
//!
//! ```text
//! Ω_i = ω + Σ_j c_ij · sin(θ_j − θ_i − φ_ij)
//! ```
//!
//! and the radial output is pulled onto the shape `f_i(θ_i)`:
//!
//! ```text
//! dr_i/dt = Ω_i · f_i'(θ_i) + γ · (f_i(θ_i) − r_i) + ξ_i
//! ```
//!
//! `r_i` is the joint-angle reference of the node's degree of freedom.

mod network;
mod shape;

use thiserror::Error;

pub use network::{
    derivatives, integrate_step, make_gait_network, make_trot_network, write_state_csv,
    FeedbackTerm, OscillatorParams, OscillatorState, SquareMatrix, DEFAULT_COUPLING, DEFAULT_DT,
    DEFAULT_GAMMA, MAX_DT,
};
pub(crate) use network::{wrap_pi, wrap_tau};
pub use shape::{encode_trajectory, ShapeFunction, DEFAULT_SHAPE_SAMPLES, PERIODICITY_TOLERANCE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CpgError {
    #[error("dimension mismatch: {what} has {got} entries, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("invalid oscillator parameter: {0}")]
    InvalidParams(String),
    #[error("integration step {dt} s outside (0, {max}] s")]
    StepOutOfRange { dt: f64, max: f64 },
    #[error("trajectory is not periodic: endpoint mismatch {mismatch:.3e} rad")]
    NotPeriodic { mismatch: f64 },
    #[error("shape needs at least {min} samples, got {got}")]
    TooFewSamples { got: usize, min: usize },
    #[error("shape sample {0} is not finite")]
    NonFiniteSample(usize),
}
