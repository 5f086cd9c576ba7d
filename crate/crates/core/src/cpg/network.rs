use std::f64::consts::{PI, TAU};
use std::io;

use super::{CpgError, ShapeFunction};
use crate::legs::LegId;

/// Coupling strength used for every connected pair in the gait networks.
pub const DEFAULT_COUPLING: f64 = 5.0;
/// Convergence rate towards the limit cycle (1/s).
pub const DEFAULT_GAMMA: f64 = 10.0;
/// Default integration step (1 kHz).
pub const DEFAULT_DT: f64 = 1e-3;
/// Largest accepted integration step.
pub const MAX_DT: f64 = 0.01;

const ANTISYMMETRY_TOLERANCE: f64 = 1e-9;

/// Dense row-major `n × n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorParams {
    /// Intrinsic angular frequency, 2π × locomotion frequency (rad/s).
    pub omega: f64,
    /// Convergence rate to the limit cycle (1/s).
    pub gamma: f64,
    pub coupling: SquareMatrix,
    /// Desired phase of node j relative to node i (rad).
    pub phase_bias: SquareMatrix,
    pub shapes: Vec<ShapeFunction>,
}

impl OscillatorParams {
    pub fn new(
        omega: f64,
        gamma: f64,
        coupling: SquareMatrix,
        phase_bias: SquareMatrix,
        shapes: Vec<ShapeFunction>,
    ) -> Result<Self, CpgError> {
        let params = Self {
            omega,
            gamma,
            coupling,
            phase_bias,
            shapes,
        };
        params.validate()?;
        Ok(params)
    }

    /// Uncoupled network with the given shapes.
    pub fn uncoupled(omega: f64, gamma: f64, shapes: Vec<ShapeFunction>) -> Result<Self, CpgError> {
        let n = shapes.len();
        Self::new(
            omega,
            gamma,
            SquareMatrix::zeros(n),
            SquareMatrix::zeros(n),
            shapes,
        )
    }

    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    pub fn validate(&self) -> Result<(), CpgError> {
        let n = self.shapes.len();
        if self.coupling.dim() != n {
            return Err(CpgError::DimensionMismatch {
                what: "coupling",
                got: self.coupling.dim(),
                expected: n,
            });
        }
        if self.phase_bias.dim() != n {
            return Err(CpgError::DimensionMismatch {
                what: "phase_bias",
                got: self.phase_bias.dim(),
                expected: n,
            });
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(CpgError::InvalidParams(format!(
                "gamma must be > 0, got {}",
                self.gamma
            )));
        }
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            return Err(CpgError::InvalidParams(format!(
                "omega must be >= 0, got {}",
                self.omega
            )));
        }
        for i in 0..n {
            if self.coupling.get(i, i) != 0.0 {
                return Err(CpgError::InvalidParams(format!(
                    "self-coupling c[{i}][{i}] must be 0"
                )));
            }
            for j in 0..n {
                let c = self.coupling.get(i, j);
                if !(c >= 0.0 && c.is_finite()) {
                    return Err(CpgError::InvalidParams(format!(
                        "coupling c[{i}][{j}] must be >= 0, got {c}"
                    )));
                }
                let coupled = c > 0.0 || self.coupling.get(j, i) > 0.0;
                if coupled && j > i {
                    let sum = self.phase_bias.get(i, j) + self.phase_bias.get(j, i);
                    if wrap_pi(sum).abs() > ANTISYMMETRY_TOLERANCE {
                        return Err(CpgError::InvalidParams(format!(
                            "phase bias not antisymmetric for pair ({i}, {j})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorState {
    /// Phases, wrapped to `[0, 2π)` after each integration step.
    pub theta: Vec<f64>,
    /// Radial outputs: joint-angle references (rad).
    pub r: Vec<f64>,
}

impl OscillatorState {
    pub fn new(theta: Vec<f64>, r: Vec<f64>) -> Self {
        Self { theta, r }
    }

    /// State sitting on the limit cycle at the given phases.
    pub fn on_limit_cycle(theta: Vec<f64>, params: &OscillatorParams) -> Self {
        let r = theta
            .iter()
            .zip(&params.shapes)
            .map(|(&t, s)| s.value(t))
            .collect();
        Self { theta, r }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }
}

/// Additive feedback `ξ` per node (rad/s).
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackTerm {
    pub xi: Vec<f64>,
}

impl FeedbackTerm {
    pub fn zeros(n: usize) -> Self {
        Self { xi: vec![0.0; n] }
    }
}

/// Phase and radial rates of every node.
pub fn derivatives(
    state: &OscillatorState,
    params: &OscillatorParams,
    fb: &FeedbackTerm,
) -> Result<(Vec<f64>, Vec<f64>), CpgError> {
    check_dims(state, params, fb)?;
    let n = params.len();
    let mut dtheta = vec![0.0; n];
    let mut dr = vec![0.0; n];
    eval_rates(&state.theta, &state.r, params, &fb.xi, &mut dtheta, &mut dr);
    Ok((dtheta, dr))
}

/// One classical Runge-Kutta step of length `dt`; phases are wrapped to
/// `[0, 2π)` afterwards.
pub fn integrate_step(
    state: &OscillatorState,
    params: &OscillatorParams,
    fb: &FeedbackTerm,
    dt: f64,
) -> Result<OscillatorState, CpgError> {
    if !(dt > 0.0 && dt <= MAX_DT) {
        return Err(CpgError::StepOutOfRange { dt, max: MAX_DT });
    }
    check_dims(state, params, fb)?;
    let n = params.len();
    let xi = &fb.xi;

    let (k1t, k1r) = rates_at(&state.theta, &state.r, 0.0, &[], &[], params, xi);
    let (k2t, k2r) = rates_at(&state.theta, &state.r, 0.5 * dt, &k1t, &k1r, params, xi);
    let (k3t, k3r) = rates_at(&state.theta, &state.r, 0.5 * dt, &k2t, &k2r, params, xi);
    let (k4t, k4r) = rates_at(&state.theta, &state.r, dt, &k3t, &k3r, params, xi);

    let sixth = dt / 6.0;
    let theta = (0..n)
        .map(|i| {
            let inc = k1t[i] + 2.0 * k2t[i] + 2.0 * k3t[i] + k4t[i];
            wrap_tau(state.theta[i] + sixth * inc)
        })
        .collect();
    let r = (0..n)
        .map(|i| state.r[i] + sixth * (k1r[i] + 2.0 * k2r[i] + 2.0 * k3r[i] + k4r[i]))
        .collect();
    Ok(OscillatorState { theta, r })
}

/// Rates at `(theta + h·dtheta, r + h·dr)`; empty increments mean `h = 0`.
fn rates_at(
    theta: &[f64],
    r: &[f64],
    h: f64,
    dtheta: &[f64],
    dr: &[f64],
    params: &OscillatorParams,
    xi: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let n = theta.len();
    let (th, rr): (Vec<f64>, Vec<f64>) = if dtheta.is_empty() {
        (theta.to_vec(), r.to_vec())
    } else {
        (
            (0..n).map(|i| theta[i] + h * dtheta[i]).collect(),
            (0..n).map(|i| r[i] + h * dr[i]).collect(),
        )
    };
    let mut out_t = vec![0.0; n];
    let mut out_r = vec![0.0; n];
    eval_rates(&th, &rr, params, xi, &mut out_t, &mut out_r);
    (out_t, out_r)
}

fn eval_rates(
    theta: &[f64],
    r: &[f64],
    params: &OscillatorParams,
    xi: &[f64],
    dtheta: &mut [f64],
    dr: &mut [f64],
) {
    for i in 0..params.len() {
        let c_row = params.coupling.row(i);
        let phi_row = params.phase_bias.row(i);
        let mut big_omega = params.omega;
        for j in 0..theta.len() {
            let c = c_row[j];
            if c != 0.0 {
                big_omega += c * (theta[j] - theta[i] - phi_row[j]).sin();
            }
        }
        let shape = &params.shapes[i];
        dtheta[i] = big_omega;
        dr[i] = big_omega * shape.derivative(theta[i])
            + params.gamma * (shape.value(theta[i]) - r[i])
            + xi[i];
    }
}

fn check_dims(
    state: &OscillatorState,
    params: &OscillatorParams,
    fb: &FeedbackTerm,
) -> Result<(), CpgError> {
    let n = params.len();
    for (what, got) in [
        ("state.theta", state.theta.len()),
        ("state.r", state.r.len()),
        ("feedback", fb.xi.len()),
        ("coupling", params.coupling.dim()),
        ("phase_bias", params.phase_bias.dim()),
    ] {
        if got != n {
            return Err(CpgError::DimensionMismatch {
                what,
                got,
                expected: n,
            });
        }
    }
    Ok(())
}

/// Fully coupled network whose phase biases reproduce the given absolute
/// node phases: `φ_ij = phase_j − phase_i`. Shapes default to zero.
pub fn make_gait_network(
    frequency: f64,
    node_phases: &[f64],
    coupling_strength: f64,
) -> Result<OscillatorParams, CpgError> {
    if !(frequency > 0.0 && frequency.is_finite()) {
        return Err(CpgError::InvalidParams(format!(
            "frequency must be > 0, got {frequency}"
        )));
    }
    let n = node_phases.len();
    let coupling = SquareMatrix::from_fn(n, |i, j| if i == j { 0.0 } else { coupling_strength });
    let phase_bias = SquareMatrix::from_fn(n, |i, j| {
        if i == j {
            0.0
        } else {
            wrap_pi(node_phases[j] - node_phases[i])
        }
    });
    OscillatorParams::new(
        TAU * frequency,
        DEFAULT_GAMMA,
        coupling,
        phase_bias,
        vec![ShapeFunction::constant(0.0); n],
    )
}

/// Trot network for four legs (`LF, RF, LH, RH`), `joints_per_leg` nodes
/// each, node index `leg * joints_per_leg + joint`.
///
/// Adjacent hips are in antiphase, diagonal hips in phase, and joints of the
/// same leg share their hip's phase. All pairs are coupled with strength 5.
pub fn make_trot_network(
    frequency: f64,
    joints_per_leg: usize,
) -> Result<OscillatorParams, CpgError> {
    if joints_per_leg < 2 {
        return Err(CpgError::InvalidParams(format!(
            "joints_per_leg must be >= 2, got {joints_per_leg}"
        )));
    }
    let phases: Vec<f64> = LegId::ALL
        .iter()
        .flat_map(|leg| std::iter::repeat_n(leg.trot_phase(), joints_per_leg))
        .collect();
    make_gait_network(frequency, &phases, DEFAULT_COUPLING)
}

/// Wraps an angle to `[0, 2π)`.
pub(crate) fn wrap_tau(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    // rem_euclid rounds tiny negatives up to exactly 2π
    if y >= TAU {
        0.0
    } else {
        y
    }
}

/// Wraps an angle to `(-π, π]`.
pub(crate) fn wrap_pi(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(TAU) - PI;
    if y <= -PI {
        y + TAU
    } else {
        y
    }
}

/// Writes `(t, θ_1..N, r_1..N)` rows with a header line.
pub fn write_state_csv<'a, W: io::Write>(
    out: W,
    rows: impl IntoIterator<Item = (f64, &'a OscillatorState)>,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header_written = false;
    for (t, state) in rows {
        if !header_written {
            let mut header = vec!["t_s".to_string()];
            header.extend((1..=state.len()).map(|i| format!("theta{i}_rad")));
            header.extend((1..=state.len()).map(|i| format!("r{i}_rad")));
            w.write_record(&header)?;
            header_written = true;
        }
        let mut rec = vec![format!("{t:.6}")];
        rec.extend(state.theta.iter().map(|v| format!("{v:.9}")));
        rec.extend(state.r.iter().map(|v| format!("{v:.9}")));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
