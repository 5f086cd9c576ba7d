use std::fmt;
use std::str::FromStr;

use super::{Bound, PsoError, SearchSpace};
use crate::sim::{simulate, GaitProgram};

/// Gait quantities the optimizer may tune; each applies to all four legs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaitParam {
    StepLength,
    LiftHeight,
    DutyFactor,
    Frequency,
}

impl GaitParam {
    pub fn name(self) -> &'static str {
        match self {
            GaitParam::StepLength => "step_length_m",
            GaitParam::LiftHeight => "lift_height_m",
            GaitParam::DutyFactor => "duty_factor",
            GaitParam::Frequency => "frequency_hz",
        }
    }

    fn apply(self, gait: &mut GaitProgram, v: f64) {
        match self {
            GaitParam::Frequency => gait.frequency = v,
            _ => {
                for leg in gait.legs.iter_mut() {
                    match self {
                        GaitParam::StepLength => leg.step_length = v,
                        GaitParam::LiftHeight => leg.lift_height = v,
                        GaitParam::DutyFactor => leg.duty_factor = v,
                        GaitParam::Frequency => unreachable!(),
                    }
                }
            }
        }
    }
}

impl fmt::Display for GaitParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GaitParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            GaitParam::StepLength,
            GaitParam::LiftHeight,
            GaitParam::DutyFactor,
            GaitParam::Frequency,
        ]
        .into_iter()
        .find(|p| p.name() == s)
        .ok_or_else(|| format!("unknown gait parameter {s:?}"))
    }
}

/// Gait search problem: tuned parameters on top of a base program, scored
/// by planar distance covered after a settling window.
#[derive(Debug, Clone, PartialEq)]
pub struct GaitSearch {
    pub base: GaitProgram,
    pub params: Vec<(GaitParam, f64, f64)>,
    /// Simulation step (s); reduced when the frequency needs it.
    pub dt: f64,
    pub settle_time: f64,
    pub window: f64,
}

impl Default for GaitSearch {
    fn default() -> Self {
        Self {
            base: GaitProgram::default(),
            params: vec![
                (GaitParam::StepLength, 0.04, 0.12),
                (GaitParam::DutyFactor, 0.4, 0.6),
                (GaitParam::LiftHeight, 0.02, 0.05),
                (GaitParam::Frequency, 3.0, 3.5),
            ],
            dt: 4e-3,
            settle_time: 5.0,
            window: 15.0,
        }
    }
}

impl GaitSearch {
    pub fn space(&self) -> Result<SearchSpace, PsoError> {
        SearchSpace::new(
            self.params
                .iter()
                .map(|&(p, lower, upper)| Bound {
                    name: p.name().to_string(),
                    lower,
                    upper,
                })
                .collect(),
        )
    }

    pub fn decode(&self, x: &[f64]) -> GaitProgram {
        let mut g = self.base.clone();
        for (&(p, _, _), &v) in self.params.iter().zip(x) {
            p.apply(&mut g, v);
        }
        g
    }
}

/// Distance (m) covered between the end of the settling window and the end
/// of the run; invalid gaits and workspace violations score −∞.
pub fn gait_objective(x: &[f64], search: &GaitSearch) -> f64 {
    if x.len() != search.params.len() {
        return f64::NEG_INFINITY;
    }
    let gait = search.decode(x);
    if gait.validate().is_err() {
        return f64::NEG_INFINITY;
    }
    let dt = search.dt.min(1.0 / (50.0 * gait.frequency));
    let log = match simulate(&gait, search.settle_time + search.window, dt) {
        Ok(l) => l,
        Err(_) => return f64::NEG_INFINITY,
    };
    let k0 = ((search.settle_time / dt).round() as usize).min(log.samples.len() - 1);
    let a = &log.samples[k0].body;
    let b = &log.samples[log.samples.len() - 1].body;
    (b.x - a.x).hypot(b.y - a.y)
}
