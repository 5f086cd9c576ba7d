use std::f64::consts::{FRAC_PI_2, TAU};

use super::log::TrajectoryLog;
use super::simulate::HIP_X;
use super::SimError;
use crate::legs::LegId;

/// Shortest log accepted by [`metrics`], in gait cycles.
pub const MIN_CYCLES: f64 = 4.0;
/// Net yaw needed by [`turning_metrics`] (rad).
pub const MIN_TURN_YAW: f64 = FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaitMetrics {
    /// Path length over duration (m/s).
    pub speed_avg: f64,
    /// Largest single-step speed (m/s).
    pub speed_peak: f64,
    /// Trot stride: net displacement per whole cycle / 2 (m).
    pub stride_effective: f64,
    /// Stance fraction per leg over the whole cycles of the log.
    pub duty_factor: [f64; 4],
    /// Half the peak-to-peak hip height (m).
    pub com_vertical_oscillation: f64,
    /// Half the peak-to-peak trunk pitch implied by stance-leg heights (rad).
    pub pitch_proxy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningMetrics {
    pub radius: f64,
    pub time_full_turn: f64,
    pub speed_avg: f64,
    /// Signed net yaw over the log (rad).
    pub yaw_change: f64,
}

fn path_length(log: &TrajectoryLog) -> f64 {
    log.samples
        .windows(2)
        .map(|w| (w[1].body.x - w[0].body.x).hypot(w[1].body.y - w[0].body.y))
        .sum()
}

fn min_max(it: impl Iterator<Item = f64>) -> (f64, f64) {
    it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

pub fn metrics(log: &TrajectoryLog) -> Result<GaitMetrics, SimError> {
    let cycles = log.cycles();
    if !(cycles >= MIN_CYCLES - 1e-9) {
        return Err(SimError::LogTooShort {
            cycles,
            min: MIN_CYCLES,
        });
    }
    let duration = log.duration();
    let speed_avg = path_length(log) / duration;
    let speed_peak = log
        .samples
        .windows(2)
        .map(|w| (w[1].body.x - w[0].body.x).hypot(w[1].body.y - w[0].body.y) / log.dt)
        .fold(0.0, f64::max);

    let whole = cycles.floor() / log.frequency;
    let n = ((whole / log.dt).round() as usize).min(log.samples.len());
    let mut duty_factor = [0.0; 4];
    for leg in LegId::ALL {
        let stance = log.samples[..n]
            .iter()
            .filter(|s| s.body.contacts[leg.index()])
            .count();
        duty_factor[leg.index()] = stance as f64 / n as f64;
    }

    // net displacement over the whole cycles, half per cycle for trot
    let (a, b) = (&log.samples[0].body, &log.samples[n.max(1) - 1].body);
    let stride_effective = (b.x - a.x).hypot(b.y - a.y) / cycles.floor() / 2.0;

    let (lo, hi) = min_max(log.samples.iter().map(|s| s.body.hip_height));

    // trunk pitch implied by the front and hind stance-leg heights
    let pitch: Vec<f64> = log
        .samples
        .iter()
        .filter_map(|s| {
            let height = |front: bool| {
                let h: Vec<f64> = LegId::ALL
                    .into_iter()
                    .filter(|l| l.is_front() == front && s.body.contacts[l.index()])
                    .map(|l| -s.foot_in_hip(l)[2])
                    .collect();
                (!h.is_empty()).then(|| h.iter().sum::<f64>() / h.len() as f64)
            };
            Some(((height(true)? - height(false)?) / (2.0 * HIP_X)).atan())
        })
        .collect();
    let pitch_proxy = if pitch.is_empty() {
        0.0
    } else {
        let (lo, hi) = min_max(pitch.into_iter());
        0.5 * (hi - lo)
    };

    Ok(GaitMetrics {
        speed_avg,
        speed_peak,
        stride_effective,
        duty_factor,
        com_vertical_oscillation: 0.5 * (hi - lo),
        pitch_proxy,
    })
}

pub fn turning_metrics(log: &TrajectoryLog) -> Result<TurningMetrics, SimError> {
    let (first, last) = match (log.samples.first(), log.samples.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(SimError::InsufficientYaw {
                yaw: 0.0,
                min: MIN_TURN_YAW,
            })
        }
    };
    let yaw_change = last.body.yaw - first.body.yaw;
    if !(yaw_change.abs() >= MIN_TURN_YAW) {
        return Err(SimError::InsufficientYaw {
            yaw: yaw_change,
            min: MIN_TURN_YAW,
        });
    }
    let duration = log.duration();
    let path = path_length(log);
    Ok(TurningMetrics {
        radius: path / yaw_change.abs(),
        time_full_turn: TAU * duration / yaw_change.abs(),
        speed_avg: path / duration,
        yaw_change,
    })
}
