//! Virtual pantograph leg: polar inverse/forward kinematics, parametric foot
//! trajectories, leg springs and joint-deflection contact estimation.
//!
//! The pantograph is reduced to a virtual leg from hip to foot described by
//! its fore-aft angle (positive forward) and its length. Foot targets live in
//! the hip frame: `x` forward, `z` up, so a standing foot has `z < 0`.

use std::f64::consts::{PI, TAU};

use thiserror::Error;

/// Slack on range checks so targets computed exactly at a limit are accepted.
const RANGE_EPS: f64 = 1e-12;

/// Default deflection threshold for contact detection (rad).
pub const DEFAULT_CONTACT_THRESHOLD: f64 = 0.02;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KinematicsError {
    #[error("out of workspace: {limit} violated ({value:.6} not in [{min:.6}, {max:.6}])")]
    OutOfWorkspace {
        limit: WorkspaceLimit,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("invalid trajectory parameter: {0}")]
    InvalidTrajectory(String),
    #[error("series length mismatch: knee has {knee} samples, ankle has {ankle}")]
    LengthMismatch { knee: usize, ankle: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkspaceLimit {
    LegLength,
    LegAngle,
    AaAngle,
}

impl std::fmt::Display for WorkspaceLimit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WorkspaceLimit::LegLength => "leg length",
            WorkspaceLimit::LegAngle => "leg angle",
            WorkspaceLimit::AaAngle => "adduction/abduction angle",
        })
    }
}

/// Geometry and spring constants of the pantograph leg.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegGeometry {
    pub length_min: f64,
    pub length_stand: f64,
    pub length_max: f64,
    /// Fore-aft leg angle limit, symmetric (rad).
    pub leg_angle_range: f64,
    /// Adduction/abduction limit, symmetric (rad).
    pub aa_range: f64,
    /// Diagonal (gravity compensating) spring, N/m.
    pub k_diagonal: f64,
    /// Parallel spring, N/m.
    pub k_parallel: f64,
    /// Foot torsion spring, N·m/rad.
    pub k_foot_torsion: f64,
}

impl Default for LegGeometry {
    fn default() -> Self {
        Self {
            length_min: 0.11,
            length_stand: 0.16,
            length_max: 0.18,
            leg_angle_range: 34f64.to_radians(),
            aa_range: 8f64.to_radians(),
            k_diagonal: 5.8e3,
            k_parallel: 7.4e3,
            // 1.21 N·mm per degree
            k_foot_torsion: 1.21e-3 * 180.0 / PI,
        }
    }
}

impl LegGeometry {
    pub fn validate(&self) -> Result<(), KinematicsError> {
        let ok = 0.0 < self.length_min
            && self.length_min < self.length_stand
            && self.length_stand < self.length_max
            && self.leg_angle_range > 0.0
            && self.aa_range >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(KinematicsError::InvalidTrajectory(format!(
                "inconsistent leg geometry {self:?}"
            )))
        }
    }
}

/// Foot position in the hip frame (m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootTarget {
    pub x: f64,
    pub z: f64,
}

impl FootTarget {
    pub fn new(x: f64, z: f64) -> Self {
        Self { x, z }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointCommand {
    /// Fore-aft leg angle (rad), positive forward.
    pub leg_angle: f64,
    /// Hip-to-foot distance (m).
    pub leg_length: f64,
    /// Adduction/abduction angle (rad).
    pub aa_angle: f64,
}

impl JointCommand {
    pub fn new(leg_angle: f64, leg_length: f64, aa_angle: f64) -> Self {
        Self {
            leg_angle,
            leg_length,
            aa_angle,
        }
    }

    /// Checks every joint against the geometry limits.
    pub fn check(&self, geom: &LegGeometry) -> Result<(), KinematicsError> {
        check_range(
            WorkspaceLimit::LegLength,
            self.leg_length,
            geom.length_min,
            geom.length_max,
        )?;
        check_range(
            WorkspaceLimit::LegAngle,
            self.leg_angle,
            -geom.leg_angle_range,
            geom.leg_angle_range,
        )?;
        check_range(
            WorkspaceLimit::AaAngle,
            self.aa_angle,
            -geom.aa_range,
            geom.aa_range,
        )
    }
}

fn check_range(
    limit: WorkspaceLimit,
    value: f64,
    min: f64,
    max: f64,
) -> Result<(), KinematicsError> {
    if value >= min - RANGE_EPS && value <= max + RANGE_EPS {
        Ok(())
    } else {
        Err(KinematicsError::OutOfWorkspace {
            limit,
            value,
            min,
            max,
        })
    }
}

/// Closed-form polar inverse kinematics of the virtual leg.
pub fn inverse_kinematics(
    target: FootTarget,
    geom: &LegGeometry,
) -> Result<JointCommand, KinematicsError> {
    let cmd = JointCommand {
        leg_angle: target.x.atan2(-target.z),
        leg_length: target.x.hypot(target.z),
        aa_angle: 0.0,
    };
    cmd.check(geom)?;
    Ok(cmd)
}

/// Foot position of an in-range joint command.
pub fn forward_kinematics(
    cmd: JointCommand,
    geom: &LegGeometry,
) -> Result<FootTarget, KinematicsError> {
    cmd.check(geom)?;
    Ok(sagittal_foot(cmd.leg_angle, cmd.leg_length))
}

/// Unchecked polar-to-Cartesian map.
pub(crate) fn sagittal_foot(leg_angle: f64, leg_length: f64) -> FootTarget {
    FootTarget {
        x: leg_length * leg_angle.sin(),
        z: -leg_length * leg_angle.cos(),
    }
}

/// Parameters of the stance-line / cycloidal-swing foot trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryParams {
    /// Fore-aft stroke (m). Negative values run the stance backwards.
    pub step_length: f64,
    /// Swing apex height above the stance line (m).
    pub lift_height: f64,
    /// Stance fraction of the cycle, in (0, 1).
    pub duty_factor: f64,
    /// Raw touchdown angle setting (rad). Carried through unmodified; it does
    /// not enter the trajectory geometry.
    pub touchdown_angle: f64,
    /// Hip height during stance (m).
    pub stand_height: f64,
}

impl Default for TrajectoryParams {
    fn default() -> Self {
        Self {
            step_length: 0.12,
            lift_height: 0.04,
            duty_factor: 0.49,
            touchdown_angle: 2.85,
            stand_height: 0.16,
        }
    }
}

impl TrajectoryParams {
    pub fn validate(&self) -> Result<(), KinematicsError> {
        let bad = |msg: String| Err(KinematicsError::InvalidTrajectory(msg));
        if !(self.duty_factor > 0.0 && self.duty_factor < 1.0) {
            return bad(format!("duty_factor {} not in (0, 1)", self.duty_factor));
        }
        if !(self.stand_height > 0.0) {
            return bad(format!("stand_height {} must be > 0", self.stand_height));
        }
        if !(self.lift_height >= 0.0 && self.lift_height < self.stand_height) {
            return bad(format!(
                "lift_height {} must be in [0, stand_height)",
                self.lift_height
            ));
        }
        if !self.step_length.is_finite() {
            return bad("step_length must be finite".into());
        }
        Ok(())
    }

    /// True when `phase` falls in the stance segment.
    pub fn in_stance(&self, phase: f64) -> bool {
        phase.rem_euclid(TAU) < TAU * self.duty_factor
    }
}

/// Foot target at `phase` (touchdown at phase 0).
///
/// Stance runs in a straight line at `z = -stand_height` from
/// `+step_length/2` to `-step_length/2`. Swing returns along a cycloid whose
/// fore-aft velocity is zero at liftoff and touchdown; its apex sits
/// `lift_height` above the stance line.
pub fn foot_trajectory(phase: f64, p: &TrajectoryParams) -> Result<FootTarget, KinematicsError> {
    p.validate()?;
    Ok(foot_trajectory_unchecked(phase, p))
}

pub(crate) fn foot_trajectory_unchecked(phase: f64, p: &TrajectoryParams) -> FootTarget {
    let phase = phase.rem_euclid(TAU);
    let half = 0.5 * p.step_length;
    let stance_end = TAU * p.duty_factor;
    if phase < stance_end {
        let s = phase / stance_end;
        FootTarget {
            x: half - p.step_length * s,
            z: -p.stand_height,
        }
    } else {
        let s = (phase - stance_end) / (TAU - stance_end);
        let arc = s - (TAU * s).sin() / TAU;
        FootTarget {
            x: -half + p.step_length * arc,
            z: -p.stand_height + p.lift_height * 0.5 * (1.0 - (TAU * s).cos()),
        }
    }
}

/// Force of a unilateral linear spring; slack (negative deflection) gives 0.
pub fn spring_force(deflection: f64, stiffness: f64) -> f64 {
    if deflection > 0.0 {
        stiffness * deflection
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContactEstimate {
    pub stance: Vec<bool>,
    /// Ankle torque from the torsion spring (N·m).
    pub ankle_torque: Vec<f64>,
}

/// Stance detection from the knee–ankle deflection difference.
pub fn contact_from_deflection(
    knee_angle: &[f64],
    ankle_angle: &[f64],
    threshold: f64,
    k_foot_torsion: f64,
) -> Result<ContactEstimate, KinematicsError> {
    if knee_angle.len() != ankle_angle.len() {
        return Err(KinematicsError::LengthMismatch {
            knee: knee_angle.len(),
            ankle: ankle_angle.len(),
        });
    }
    let (stance, ankle_torque) = knee_angle
        .iter()
        .zip(ankle_angle)
        .map(|(k, a)| {
            let d = k - a;
            (d > threshold, d * k_foot_torsion)
        })
        .unzip();
    Ok(ContactEstimate {
        stance,
        ankle_torque,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn default_geometry_values() {
        let g = LegGeometry::default();
        g.validate().unwrap();
        assert!((g.k_foot_torsion - 0.069328).abs() < 1e-6);
        assert!((g.leg_angle_range - 0.593412).abs() < 1e-6);
    }

    #[test]
    fn ik_under_hip() {
        let cmd = inverse_kinematics(FootTarget::new(0.0, -0.16), &LegGeometry::default()).unwrap();
        assert_eq!(cmd.leg_angle, 0.0);
        assert!((cmd.leg_length - 0.16).abs() < 1e-15);
    }

    #[test]
    fn ik_hand_trigonometry() {
        let cmd =
            inverse_kinematics(FootTarget::new(0.05, -0.15), &LegGeometry::default()).unwrap();
        assert!((cmd.leg_angle - 0.3217).abs() < 1e-4);
        assert!((cmd.leg_length - 0.15811).abs() < 1e-5);
    }

    #[test]
    fn ik_too_long() {
        let err =
            inverse_kinematics(FootTarget::new(0.0, -0.25), &LegGeometry::default()).unwrap_err();
        assert!(matches!(
            err,
            KinematicsError::OutOfWorkspace {
                limit: WorkspaceLimit::LegLength,
                ..
            }
        ));
    }

    #[test]
    fn ik_angle_limit() {
        let err =
            inverse_kinematics(FootTarget::new(0.12, -0.12), &LegGeometry::default()).unwrap_err();
        assert!(matches!(
            err,
            KinematicsError::OutOfWorkspace {
                limit: WorkspaceLimit::LegAngle,
                ..
            }
        ));
    }

    #[test]
    fn fk_examples() {
        let g = LegGeometry::default();
        let f = forward_kinematics(JointCommand::new(0.0, 0.16, 0.0), &g).unwrap();
        assert_eq!(f.x, 0.0);
        assert!((f.z + 0.16).abs() < 1e-15);
        let corner =
            forward_kinematics(JointCommand::new(34f64.to_radians(), 0.18, 0.0), &g).unwrap();
        assert!((corner.x - 0.1007).abs() < 1e-4);
        assert!((corner.z + 0.1492).abs() < 1e-4);
        assert!(forward_kinematics(JointCommand::new(0.0, 0.2, 0.0), &g).is_err());
        assert!(forward_kinematics(JointCommand::new(0.0, 0.16, 0.2), &g).is_err());
    }

    #[test]
    fn trajectory_landmarks() {
        let p = TrajectoryParams::default();
        let mid = foot_trajectory(PI * p.duty_factor, &p).unwrap();
        assert!(mid.x.abs() < 1e-15);
        assert_eq!(mid.z, -0.16);
        let apex_phase = TAU * p.duty_factor + 0.5 * TAU * (1.0 - p.duty_factor);
        let apex = foot_trajectory(apex_phase, &p).unwrap();
        assert!((apex.z + 0.12).abs() < 1e-12);
        assert!(apex.x.abs() < 1e-12);
        let td = foot_trajectory(0.0, &p).unwrap();
        assert!((td.x - 0.06).abs() < 1e-15);
        let end = foot_trajectory(TAU - 1e-12, &p).unwrap();
        assert!((end.x - td.x).abs() < 1e-9 && (end.z - td.z).abs() < 1e-9);
    }

    #[test]
    fn degenerate_zero_step() {
        let p = TrajectoryParams {
            step_length: 0.0,
            lift_height: 0.0,
            ..TrajectoryParams::default()
        };
        for k in 0..100 {
            let f = foot_trajectory(k as f64 * TAU / 100.0, &p).unwrap();
            assert_eq!(f.x, 0.0);
            assert_eq!(f.z, -0.16);
        }
    }

    #[test]
    fn trajectory_parameter_errors() {
        let base = TrajectoryParams::default();
        for p in [
            TrajectoryParams {
                duty_factor: 0.0,
                ..base
            },
            TrajectoryParams {
                duty_factor: 1.0,
                ..base
            },
            TrajectoryParams {
                lift_height: 0.16,
                ..base
            },
            TrajectoryParams {
                stand_height: 0.0,
                ..base
            },
        ] {
            assert!(foot_trajectory(0.0, &p).is_err());
        }
    }

    #[test]
    fn default_trajectory_stays_in_workspace() {
        let p = TrajectoryParams::default();
        let g = LegGeometry::default();
        for k in 0..4096 {
            let f = foot_trajectory(k as f64 * TAU / 4096.0, &p).unwrap();
            inverse_kinematics(f, &g).unwrap();
        }
    }

    #[test]
    fn stance_fraction_matches_duty() {
        let p = TrajectoryParams::default();
        let n = 1000;
        let stance = (0..n)
            .filter(|&k| p.in_stance(k as f64 * TAU / n as f64))
            .count();
        assert!((stance as f64 / n as f64 - p.duty_factor).abs() <= 1.0 / n as f64);
    }

    #[test]
    fn springs() {
        let g = LegGeometry::default();
        assert!((spring_force(0.010, g.k_diagonal) - 58.0).abs() < 1e-9);
        assert_eq!(spring_force(0.0, g.k_diagonal), 0.0);
        assert_eq!(spring_force(-0.005, g.k_diagonal), 0.0);
    }

    #[test]
    fn contact_basic_cases() {
        let knee = vec![0.1; 10];
        let est = contact_from_deflection(&knee, &knee, 0.02, 0.07).unwrap();
        assert!(est.stance.iter().all(|s| !s));
        assert!(est.ankle_torque.iter().all(|t| *t == 0.0));

        let ankle: Vec<f64> = knee.iter().map(|k| k - 0.04).collect();
        let est = contact_from_deflection(&knee, &ankle, 0.02, 0.07).unwrap();
        assert!(est.stance.iter().all(|s| *s));

        assert!(matches!(
            contact_from_deflection(&knee, &ankle[..3], 0.02, 0.07),
            Err(KinematicsError::LengthMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn ik_fk_round_trip(
            angle in -34f64.to_radians()..34f64.to_radians(),
            length in 0.11f64..0.18,
        ) {
            let g = LegGeometry::default();
            let cmd = JointCommand::new(angle, length, 0.0);
            let foot = forward_kinematics(cmd, &g).unwrap();
            let back = inverse_kinematics(foot, &g).unwrap();
            let again = forward_kinematics(back, &g).unwrap();
            prop_assert!((again.x - foot.x).abs() < 1e-9);
            prop_assert!((again.z - foot.z).abs() < 1e-9);
        }

        #[test]
        fn trajectory_is_periodic(phase in 0.0f64..TAU, step in -0.12f64..0.12) {
            let p = TrajectoryParams { step_length: step, ..TrajectoryParams::default() };
            let a = foot_trajectory(phase, &p).unwrap();
            let b = foot_trajectory(phase + TAU, &p).unwrap();
            prop_assert!((a.x - b.x).abs() < 1e-9 && (a.z - b.z).abs() < 1e-9);
        }
    }
}
