//! Experiment configuration file. Every key carries its unit in the name;
//! unknown keys are rejected. Missing sections and keys take the defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};

use oncilla_core::actuation::{MotorSpec, SldmParams};
use oncilla_core::kinematics::TrajectoryParams;
use oncilla_core::pso::{GaitParam, GaitSearch, SwarmConfig};
use oncilla_core::sbcp::BusConfig;
use oncilla_core::sim::{GaitProgram, GaitType, SimOptions};
use oncilla_core::steering::{TurnCommand, TurnConvention, TurnStrategy, DEFAULT_AA_GAIN};

use crate::Failure;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub gait: GaitSection,
    pub steering: SteeringSection,
    pub sim: SimSection,
    pub motor: MotorSection,
    pub pso: PsoSection,
    pub sbcp: SbcpSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaitKind {
    Trot,
    Pace,
    Bound,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaitSection {
    pub frequency_hz: f64,
    pub step_length_m: f64,
    pub lift_height_m: f64,
    pub duty_factor: f64,
    pub stand_height_m: f64,
    pub touchdown_angle_rad: f64,
    pub gait_type: GaitKind,
    /// Leg phases `LF, RF, LH, RH`, used with `gait_type = "custom"`.
    pub leg_phases_rad: [f64; 4],
    pub slip: f64,
}

impl Default for GaitSection {
    fn default() -> Self {
        let t = TrajectoryParams::default();
        Self {
            frequency_hz: 3.5,
            step_length_m: t.step_length,
            lift_height_m: t.lift_height,
            duty_factor: t.duty_factor,
            stand_height_m: t.stand_height,
            touchdown_angle_rad: t.touchdown_angle,
            gait_type: GaitKind::Trot,
            leg_phases_rad: GaitType::Trot.leg_phases(),
            slip: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    None,
    Asl,
    AaAmp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConventionKind {
    PositiveShortensRight,
    PositiveShortensLeft,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SteeringSection {
    pub strategy: StrategyKind,
    pub varpi: f64,
    pub yaw_rate_rad_s: f64,
    pub aa_gain_rad_s: f64,
    pub convention: ConventionKind,
}

impl Default for SteeringSection {
    fn default() -> Self {
        Self {
            strategy: StrategyKind::None,
            varpi: 0.0,
            yaw_rate_rad_s: 0.0,
            aa_gain_rad_s: DEFAULT_AA_GAIN,
            convention: ConventionKind::PositiveShortensRight,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub duration_s: f64,
    pub dt_s: f64,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            duration_s: 10.0,
            dt_s: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MotorSpecSection {
    pub max_torque_nm: f64,
    pub no_load_speed_rad_s: f64,
    pub gear_ratio: f64,
    pub current_limit_a: f64,
    pub torque_at_current_limit_nm: f64,
}

impl From<MotorSpec> for MotorSpecSection {
    fn from(m: MotorSpec) -> Self {
        Self {
            max_torque_nm: m.max_torque,
            no_load_speed_rad_s: m.no_load_speed,
            gear_ratio: m.gear_ratio,
            current_limit_a: m.current_limit,
            torque_at_current_limit_nm: m.torque_at_current_limit,
        }
    }
}

impl Default for MotorSpecSection {
    fn default() -> Self {
        MotorSpec::leg_angle().into()
    }
}

impl MotorSpecSection {
    fn to_spec(&self, name: &str) -> Result<MotorSpec, Failure> {
        let ok = [
            self.max_torque_nm,
            self.no_load_speed_rad_s,
            self.gear_ratio,
            self.current_limit_a,
            self.torque_at_current_limit_nm,
        ]
        .iter()
        .all(|v| *v > 0.0 && v.is_finite());
        if !ok {
            return Err(Failure::invalid(format!(
                "motor.{name}: all values must be finite and > 0"
            )));
        }
        Ok(MotorSpec {
            max_torque: self.max_torque_nm,
            no_load_speed: self.no_load_speed_rad_s,
            gear_ratio: self.gear_ratio,
            current_limit: self.current_limit_a,
            torque_at_current_limit: self.torque_at_current_limit_nm,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MotorSection {
    pub mass_kg: f64,
    pub stand_height_m: f64,
    pub step_length_m: f64,
    pub lift_height_m: f64,
    pub duty_factor: f64,
    pub leg_inertia_kg_m2: f64,
    pub rest_length_m: f64,
    pub spring_stiffness_n_per_m: f64,
    pub spring_preload_n: f64,
    pub ll_lever_m: f64,
    pub gear_efficiency: f64,
    pub samples_per_cycle: usize,
    pub sweep_speeds_mps: Vec<f64>,
    pub leg_angle: MotorSpecSection,
    pub leg_length: MotorSpecSection,
}

impl Default for MotorSection {
    fn default() -> Self {
        let p = SldmParams::default();
        Self {
            mass_kg: p.mass,
            stand_height_m: p.stand_height,
            step_length_m: p.step_length,
            lift_height_m: p.lift_height,
            duty_factor: p.duty_factor,
            leg_inertia_kg_m2: p.leg_inertia,
            rest_length_m: p.rest_length,
            spring_stiffness_n_per_m: p.spring_stiffness,
            spring_preload_n: p.spring_preload,
            ll_lever_m: p.ll_lever,
            gear_efficiency: p.gear_efficiency,
            samples_per_cycle: p.samples_per_cycle,
            sweep_speeds_mps: vec![0.05, 0.2, 0.41, 0.55, 0.71],
            leg_angle: MotorSpec::leg_angle().into(),
            leg_length: MotorSpec::leg_length().into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsoParamSection {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoSection {
    pub particles: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub dt_s: f64,
    pub settle_s: f64,
    pub window_s: f64,
    pub params: Vec<PsoParamSection>,
}

impl Default for PsoSection {
    fn default() -> Self {
        let s = SwarmConfig::default();
        let g = GaitSearch::default();
        Self {
            particles: 16,
            iterations: 25,
            inertia: s.inertia,
            cognitive: s.cognitive,
            social: s.social,
            dt_s: g.dt,
            settle_s: g.settle_time,
            window_s: g.window,
            params: g
                .params
                .iter()
                .map(|&(p, lower, upper)| PsoParamSection {
                    name: p.name().to_string(),
                    lower,
                    upper,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SbcpSection {
    pub baud_bps: f64,
    pub base_latency_s: f64,
    pub jitter_max_s: f64,
    pub slave_timeout_s: f64,
    pub slaves: usize,
}

impl Default for SbcpSection {
    fn default() -> Self {
        let b = BusConfig::default();
        Self {
            baud_bps: b.baud,
            base_latency_s: b.base_latency,
            jitter_max_s: b.jitter_max,
            slave_timeout_s: b.slave_timeout,
            slaves: 8,
        }
    }
}

/// Reads a config file; syntax and schema errors carry line and column.
pub fn load(path: &Path) -> Result<ExperimentConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::invalid(format!("cannot read config {}: {e}", path.display())))?;
    parse(&text).map_err(|e| Failure::invalid(format!("{}:{e}", path.display())))
}

pub fn parse(text: &str) -> Result<ExperimentConfig, String> {
    serde_json::from_str(text).map_err(|e| {
        format!(
            "{}:{}: {}",
            e.line(),
            e.column(),
            // serde_json appends the position; keep only the message
            e.to_string()
                .rsplit_once(" at line ")
                .map_or(e.to_string(), |(m, _)| m.to_string())
        )
    })
}

impl ExperimentConfig {
    pub fn trajectory(&self) -> TrajectoryParams {
        TrajectoryParams {
            step_length: self.gait.step_length_m,
            lift_height: self.gait.lift_height_m,
            duty_factor: self.gait.duty_factor,
            touchdown_angle: self.gait.touchdown_angle_rad,
            stand_height: self.gait.stand_height_m,
        }
    }

    /// Gait program before any steering is applied.
    pub fn gait_program(&self) -> Result<GaitProgram, Failure> {
        let g = &self.gait;
        let gait = match g.gait_type {
            GaitKind::Trot => GaitType::Trot,
            GaitKind::Pace => GaitType::Pace,
            GaitKind::Bound => GaitType::Bound,
            GaitKind::Custom => GaitType::Custom(g.leg_phases_rad),
        };
        let traj = self.trajectory();
        traj.validate()
            .map_err(|e| Failure::invalid(format!("gait: {e}")))?;
        let program = GaitProgram {
            frequency: g.frequency_hz,
            legs: [traj; 4],
            gait,
            aa_amplitude: [0.0; 4],
            slip: g.slip,
        };
        program
            .validate()
            .map_err(|e| Failure::invalid(format!("gait: {e}")))?;
        Ok(program)
    }

    pub fn turn_command(&self) -> Option<TurnCommand> {
        let s = &self.steering;
        let convention = match s.convention {
            ConventionKind::PositiveShortensRight => TurnConvention::PositiveShortensRight,
            ConventionKind::PositiveShortensLeft => TurnConvention::PositiveShortensLeft,
        };
        let strategy = match s.strategy {
            StrategyKind::None => return None,
            StrategyKind::Asl => TurnStrategy::Asl { varpi: s.varpi },
            StrategyKind::AaAmp => TurnStrategy::AaAmp {
                yaw_rate: s.yaw_rate_rad_s,
                gain: s.aa_gain_rad_s,
            },
        };
        Some(TurnCommand {
            strategy,
            convention,
        })
    }

    pub fn sim_step(&self) -> Result<(f64, f64), Failure> {
        let s = &self.sim;
        if !(s.duration_s > 0.0 && s.duration_s.is_finite()) {
            return Err(Failure::invalid(format!(
                "sim.duration_s {} must be > 0",
                s.duration_s
            )));
        }
        if !(s.dt_s > 0.0) {
            return Err(Failure::invalid(format!("sim.dt_s {} must be > 0", s.dt_s)));
        }
        Ok((s.duration_s, s.dt_s))
    }

    pub fn sldm(&self) -> Result<SldmParams, Failure> {
        let m = &self.motor;
        let p = SldmParams {
            mass: m.mass_kg,
            stand_height: m.stand_height_m,
            step_length: m.step_length_m,
            lift_height: m.lift_height_m,
            duty_factor: m.duty_factor,
            leg_inertia: m.leg_inertia_kg_m2,
            rest_length: m.rest_length_m,
            spring_stiffness: m.spring_stiffness_n_per_m,
            spring_preload: m.spring_preload_n,
            ll_lever: m.ll_lever_m,
            gear_efficiency: m.gear_efficiency,
            samples_per_cycle: m.samples_per_cycle,
        };
        p.validate()
            .map_err(|e| Failure::invalid(format!("motor: {e}")))?;
        Ok(p)
    }

    pub fn motors(&self) -> Result<(MotorSpec, MotorSpec), Failure> {
        Ok((
            self.motor.leg_angle.to_spec("leg_angle")?,
            self.motor.leg_length.to_spec("leg_length")?,
        ))
    }

    pub fn sim_options(&self) -> Result<SimOptions, Failure> {
        let (la_motor, ll_motor) = self.motors()?;
        Ok(SimOptions {
            load: self.sldm()?,
            la_motor,
            ll_motor,
            ..SimOptions::default()
        })
    }

    pub fn swarm(&self) -> Result<SwarmConfig, Failure> {
        let p = &self.pso;
        let cfg = SwarmConfig {
            particles: p.particles,
            iterations: p.iterations,
            inertia: p.inertia,
            cognitive: p.cognitive,
            social: p.social,
            seed: self.seed,
        };
        cfg.validate()
            .map_err(|e| Failure::invalid(format!("pso: {e}")))?;
        Ok(cfg)
    }

    pub fn gait_search(&self) -> Result<GaitSearch, Failure> {
        let p = &self.pso;
        let params = p
            .params
            .iter()
            .map(|q| {
                let param: GaitParam = q
                    .name
                    .parse()
                    .map_err(|e| Failure::invalid(format!("pso.params: {e}")))?;
                Ok((param, q.lower, q.upper))
            })
            .collect::<Result<Vec<_>, Failure>>()?;
        if !(p.dt_s > 0.0 && p.settle_s >= 0.0 && p.window_s > 0.0) {
            return Err(Failure::invalid(
                "pso: dt_s and window_s must be > 0, settle_s >= 0",
            ));
        }
        let search = GaitSearch {
            base: self.gait_program()?,
            params,
            dt: p.dt_s,
            settle_time: p.settle_s,
            window: p.window_s,
        };
        search
            .space()
            .map_err(|e| Failure::invalid(format!("pso: {e}")))?;
        Ok(search)
    }

    pub fn bus(&self) -> Result<BusConfig, Failure> {
        let s = &self.sbcp;
        let cfg = BusConfig {
            baud: s.baud_bps,
            base_latency: s.base_latency_s,
            jitter_max: s.jitter_max_s,
            slave_timeout: s.slave_timeout_s,
            rng_seed: self.seed,
        };
        cfg.validate()
            .map_err(|e| Failure::invalid(format!("sbcp: {e}")))?;
        Ok(cfg)
    }
}
