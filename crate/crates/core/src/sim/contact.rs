use std::f64::consts::PI;

use super::log::TrajectoryLog;
use crate::legs::LegId;

/// Commanded stance flags of one leg over the log.
pub fn commanded_stance(log: &TrajectoryLog, leg: LegId) -> Vec<bool> {
    log.samples
        .iter()
        .map(|s| s.body.contacts[leg.index()])
        .collect()
}

/// Synthetic knee and ankle traces for one leg. The ankle follows the leg
/// angle; the knee adds a half-sine deflection of height `peak` (rad) across
/// every commanded stance window, as a loaded torsion spring would.
pub fn synthetic_deflection(log: &TrajectoryLog, leg: LegId, peak: f64) -> (Vec<f64>, Vec<f64>) {
    let stance = commanded_stance(log, leg);
    let ankle: Vec<f64> = log
        .samples
        .iter()
        .map(|s| s.joints[leg.index()].leg_angle)
        .collect();
    let mut knee = ankle.clone();
    let mut k = 0;
    while k < stance.len() {
        if !stance[k] {
            k += 1;
            continue;
        }
        let start = k;
        while k < stance.len() && stance[k] {
            k += 1;
        }
        let len = k - start;
        for (i, v) in knee[start..k].iter_mut().enumerate() {
            *v += peak * (PI * (i as f64 + 0.5) / len as f64).sin();
        }
    }
    (knee, ankle)
}

/// Intersection over union of two boolean series; 1 when both are empty.
pub fn jaccard(a: &[bool], b: &[bool]) -> f64 {
    let (mut inter, mut union) = (0usize, 0usize);
    for (&x, &y) in a.iter().zip(b) {
        inter += (x && y) as usize;
        union += (x || y) as usize;
    }
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}
