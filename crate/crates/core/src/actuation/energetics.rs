use super::{domain, ActuationError};

/// Standard gravity (m/s²).
pub const GRAVITY: f64 = 9.81;

/// Stand-by electrical power of the robot with idle actuators (W). Measured
/// power has this subtracted before computing COT; model power never
/// includes it.
pub const STANDBY_POWER_W: f64 = 19.6;

/// Cost of transport `P / (m g v)` in J/(N·m).
pub fn cost_of_transport(power: f64, mass: f64, speed: f64) -> Result<f64, ActuationError> {
    if !(power >= 0.0 && power.is_finite()) {
        return Err(domain("power", ">= 0", power));
    }
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(domain("mass", "> 0", mass));
    }
    if !(speed > 0.0 && speed.is_finite()) {
        return Err(domain("speed", "> 0", speed));
    }
    Ok(power / (mass * GRAVITY * speed))
}

/// Froude number `v² / (g l)` with `l` the standing hip height.
pub fn froude(speed: f64, hip_height: f64) -> Result<f64, ActuationError> {
    if !(hip_height > 0.0 && hip_height.is_finite()) {
        return Err(domain("hip height", "> 0", hip_height));
    }
    Ok(speed * speed / (GRAVITY * hip_height))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cot_examples() {
        let cot = cost_of_transport(89.0, 4.5, 0.63).unwrap();
        assert!((cot - 3.2).abs() < 0.05);
        assert_eq!(cost_of_transport(0.0, 4.5, 0.63).unwrap(), 0.0);
        assert!(cost_of_transport(1.0, 4.5, 0.0).is_err());
        assert!(cost_of_transport(1.0, 0.0, 1.0).is_err());
        assert!(cost_of_transport(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn froude_examples() {
        assert!((froude(0.63, 0.16).unwrap() - 0.25).abs() <= 0.01);
        assert!((froude(0.55, 0.16).unwrap() - 0.19).abs() <= 0.01);
        assert_eq!(froude(0.0, 0.3).unwrap(), 0.0);
        assert!(froude(1.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn cot_homogeneous(p in 0.0f64..500.0, m in 0.1f64..50.0, v in 0.01f64..5.0, k in 0.1f64..10.0) {
            let a = cost_of_transport(k * p, m, k * v).unwrap();
            let b = cost_of_transport(p, m, v).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0));
        }

        #[test]
        fn froude_monotone(v in 0.0f64..3.0, dv in 1e-3f64..1.0, l in 0.05f64..1.0, dl in 1e-3f64..1.0) {
            prop_assert!(froude(v + dv, l).unwrap() > froude(v, l).unwrap());
            if v > 0.0 {
                prop_assert!(froude(v, l + dl).unwrap() < froude(v, l).unwrap());
            }
        }
    }
}
