/// Motor plus gearbox, all quantities at the gear output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotorSpec {
    /// Torque at zero speed on the linear torque-speed line (N·m).
    pub max_torque: f64,
    /// Speed at which available torque reaches zero (rad/s).
    pub no_load_speed: f64,
    pub gear_ratio: f64,
    /// Driver current limit (A).
    pub current_limit: f64,
    /// Output torque at the current limit (N·m); saturates the torque line.
    pub torque_at_current_limit: f64,
}

impl MotorSpec {
    /// Leg-angle actuator, 84:1: 53.5 mN·m × 84 ≈ 4.5 N·m and
    /// 16300 rpm / 84 ≈ 20.3 rad/s, kept at the rounded values.
    pub fn leg_angle() -> Self {
        Self {
            max_torque: 4.5,
            no_load_speed: 20.3,
            gear_ratio: 84.0,
            current_limit: 6.0,
            torque_at_current_limit: 7.1,
        }
    }

    /// Leg-length actuator, 56:1, same motor: 53.5 mN·m × 56 ≈ 3.0 N·m and
    /// 16300 rpm / 56 ≈ 30.5 rad/s.
    pub fn leg_length() -> Self {
        Self {
            max_torque: 3.0,
            no_load_speed: 30.5,
            gear_ratio: 56.0,
            current_limit: 6.0,
            torque_at_current_limit: 4.7,
        }
    }

    /// Torque ceiling independent of speed.
    pub fn peak_torque(&self) -> f64 {
        self.max_torque.min(self.torque_at_current_limit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvailableTorque {
    pub torque: f64,
    /// Set when `|speed|` exceeds the no-load speed.
    pub over_speed: bool,
}

/// Available output torque at `speed` on the linear torque-speed line,
/// saturated at the current-limit torque.
pub fn available_torque(speed: f64, spec: &MotorSpec) -> AvailableTorque {
    let s = speed.abs();
    if s > spec.no_load_speed {
        return AvailableTorque {
            torque: 0.0,
            over_speed: true,
        };
    }
    let line = spec.max_torque * (1.0 - s / spec.no_load_speed);
    AvailableTorque {
        torque: line.min(spec.torque_at_current_limit).max(0.0),
        over_speed: false,
    }
}

/// Electrical input power for an output torque/speed pair.
///
/// Positive mechanical work is divided by the gear efficiency; negative work
/// is dissipated (no regeneration). Copper loss comes from the equivalent
/// winding resistance implied by the torque-speed line: at stall all of
/// `max_torque · no_load_speed` is dissipated, so the loss is
/// `τ² · ω₀ / τ₀`.
pub fn electrical_power(torque: f64, speed: f64, spec: &MotorSpec, gear_efficiency: f64) -> f64 {
    let mech = torque * speed;
    let drive = if mech > 0.0 {
        mech / gear_efficiency
    } else {
        0.0
    };
    drive + torque * torque * spec.no_load_speed / spec.max_torque
}
