use super::motor::{available_torque, MotorSpec};
use super::ActuationError;

/// Driver-internal control loop rate (Hz).
pub const INTERNAL_LOOP_HZ: f64 = 1000.0;
/// Highest setpoint tracking rate, half the internal loop (Hz).
pub const MAX_TRACKING_HZ: f64 = 500.0;

/// Position PID running on the motor driver.
///
/// Default gains give a critically damped response (ωn = 10 rad/s) on a
/// unit-inertia load with a weak integral term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidConfig {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Rate at which new setpoints are consumed (Hz).
    pub tracking_frequency: f64,
    pub internal_loop: f64,
}

impl Default for PidConfig {
    fn default() -> Self {
        Self {
            kp: 100.0,
            ki: 10.0,
            kd: 20.0,
            tracking_frequency: MAX_TRACKING_HZ,
            internal_loop: INTERNAL_LOOP_HZ,
        }
    }
}

impl PidConfig {
    pub fn validate(&self) -> Result<(), ActuationError> {
        if !(self.tracking_frequency > 0.0 && self.tracking_frequency <= MAX_TRACKING_HZ) {
            return Err(ActuationError::Config(format!(
                "tracking frequency {} Hz outside (0, {MAX_TRACKING_HZ}] Hz",
                self.tracking_frequency
            )));
        }
        if !(self.internal_loop > 0.0) {
            return Err(ActuationError::Config(format!(
                "internal loop rate {} Hz must be > 0",
                self.internal_loop
            )));
        }
        Ok(())
    }
}

/// Setpoints from `current` to `target` spread linearly over `duration`
/// seconds at the tracking rate. Endpoints are reproduced exactly; a
/// zero move yields a single setpoint.
pub fn velocity_profile(
    current: f64,
    target: f64,
    duration: f64,
    cfg: &PidConfig,
) -> Result<Vec<f64>, ActuationError> {
    cfg.validate()?;
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(ActuationError::Config(format!(
            "profile duration {duration} s must be >= 0"
        )));
    }
    if current == target {
        return Ok(vec![target]);
    }
    let steps = ((duration * cfg.tracking_frequency).round() as usize).max(1);
    let delta = target - current;
    let mut out: Vec<f64> = (0..steps)
        .map(|k| current + delta * k as f64 / steps as f64)
        .collect();
    out.push(target);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PidState {
    pub pos: f64,
    pub vel: f64,
    pub integral: f64,
}

/// One PID update at the internal loop rate. Returns the torque command,
/// clamped to the torque-speed envelope at the current velocity. The
/// integrator is frozen while the output is clamped.
pub fn pid_step(
    state: &mut PidState,
    setpoint: f64,
    cfg: &PidConfig,
    spec: &MotorSpec,
    dt: f64,
) -> Result<f64, ActuationError> {
    let expected = 1.0 / cfg.internal_loop;
    if (dt - expected).abs() > 1e-9 * expected {
        return Err(ActuationError::Config(format!(
            "PID step {dt} s does not match the internal loop period {expected} s"
        )));
    }
    let error = setpoint - state.pos;
    // derivative on measurement: setpoints are held between updates
    let d_error = -state.vel;
    let candidate_integral = state.integral + error * dt;
    let raw = cfg.kp * error + cfg.ki * candidate_integral + cfg.kd * d_error;
    let limit = available_torque(state.vel, spec).torque;
    let torque = raw.clamp(-limit, limit);
    if torque == raw {
        state.integral = candidate_integral;
    }
    Ok(torque)
}
