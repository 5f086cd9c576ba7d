use std::io;

use super::simulate::{HIP_X, HIP_Y};
use super::SimError;
use crate::kinematics::{sagittal_foot, JointCommand};
use crate::legs::LegId;

/// Planar trunk pose plus hip height and contacts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyState {
    pub x: f64,
    pub y: f64,
    /// Heading (rad), unwrapped.
    pub yaw: f64,
    pub hip_height: f64,
    pub contacts: [bool; 4],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSample {
    pub t: f64,
    pub body: BodyState,
    pub joints: [JointCommand; 4],
    /// Electrical power of the LA and LL motors (W).
    pub power: f64,
}

impl LogSample {
    /// Foot position of `leg` relative to its hip, in the trunk frame
    /// (x forward, y left, z up).
    pub fn foot_in_hip(&self, leg: LegId) -> [f64; 3] {
        let j = self.joints[leg.index()];
        let s = sagittal_foot(j.leg_angle, j.leg_length);
        [s.x, -s.z * j.aa_angle.sin(), s.z * j.aa_angle.cos()]
    }

    /// Foot position in the world frame, ground at z = 0.
    pub fn foot_world(&self, leg: LegId) -> [f64; 3] {
        let [fx, fy, fz] = self.foot_in_hip(leg);
        let hx = if leg.is_front() { HIP_X } else { -HIP_X };
        let hy = if leg.is_left() { HIP_Y } else { -HIP_Y };
        let (bx, by) = (hx + fx, hy + fy);
        let (s, c) = self.body.yaw.sin_cos();
        [
            self.body.x + c * bx - s * by,
            self.body.y + s * bx + c * by,
            self.body.hip_height + fz,
        ]
    }
}

/// Uniformly sampled simulation record.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    /// Locomotion frequency of the run (Hz).
    pub frequency: f64,
    pub dt: f64,
    pub samples: Vec<LogSample>,
}

const FIELDS_PER_LEG: [&str; 4] = ["angle_rad", "length_m", "aa_rad", "contact"];

fn header() -> Vec<String> {
    let mut h: Vec<String> = ["t_s", "x_m", "y_m", "yaw_rad", "hip_height_m"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for leg in LegId::ALL {
        for f in FIELDS_PER_LEG {
            h.push(format!("{leg}_{f}"));
        }
    }
    h.push("power_W".into());
    h
}

impl TrajectoryLog {
    pub fn duration(&self) -> f64 {
        self.samples.len().saturating_sub(1) as f64 * self.dt
    }

    pub fn cycles(&self) -> f64 {
        self.duration() * self.frequency
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(header())?;
        for s in &self.samples {
            let b = &s.body;
            let mut rec = vec![
                format!("{:.6}", s.t),
                format!("{:.9}", b.x),
                format!("{:.9}", b.y),
                format!("{:.9}", b.yaw),
                format!("{:.9}", b.hip_height),
            ];
            for (j, c) in s.joints.iter().zip(b.contacts) {
                rec.push(format!("{:.9}", j.leg_angle));
                rec.push(format!("{:.9}", j.leg_length));
                rec.push(format!("{:.9}", j.aa_angle));
                rec.push(if c { "1" } else { "0" }.into());
            }
            rec.push(format!("{:.6}", s.power));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a log written by [`TrajectoryLog::write_csv`]. The file does not
    /// store the locomotion frequency, so it is passed in.
    pub fn read_csv<R: io::Read>(input: R, frequency: f64) -> Result<Self, SimError> {
        let fmt_err = |m: String| SimError::LogFormat(m);
        let mut r = csv::Reader::from_reader(input);
        let found: Vec<String> = r
            .headers()
            .map_err(|e| fmt_err(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        if found != header() {
            return Err(fmt_err("unexpected header".into()));
        }
        let mut samples = Vec::new();
        for (row, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| fmt_err(e.to_string()))?;
            let num = |i: usize| -> Result<f64, SimError> {
                rec[i]
                    .parse::<f64>()
                    .map_err(|e| fmt_err(format!("row {}, column {}: {e}", row + 2, i + 1)))
            };
            let mut joints = [JointCommand::new(0.0, 0.0, 0.0); 4];
            let mut contacts = [false; 4];
            for k in 0..4 {
                let base = 5 + 4 * k;
                joints[k] = JointCommand::new(num(base)?, num(base + 1)?, num(base + 2)?);
                contacts[k] = match &rec[base + 3] {
                    "1" => true,
                    "0" => false,
                    other => {
                        return Err(fmt_err(format!(
                            "row {}: bad contact flag {other:?}",
                            row + 2
                        )))
                    }
                };
            }
            samples.push(LogSample {
                t: num(0)?,
                body: BodyState {
                    x: num(1)?,
                    y: num(2)?,
                    yaw: num(3)?,
                    hip_height: num(4)?,
                    contacts,
                },
                joints,
                power: num(21)?,
            });
        }
        if samples.len() < 2 {
            return Err(fmt_err("log needs at least two samples".into()));
        }
        let dt = (samples[samples.len() - 1].t - samples[0].t) / (samples.len() - 1) as f64;
        for w in samples.windows(2) {
            if ((w[1].t - w[0].t) - dt).abs() > 2.5e-6 {
                return Err(fmt_err(format!(
                    "non-uniform time step near t = {}",
                    w[0].t
                )));
            }
        }
        Ok(Self {
            frequency,
            dt,
            samples,
        })
    }
}
