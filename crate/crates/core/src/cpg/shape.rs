//! Periodic limit-cycle shapes for morphed oscillators.

use std::f64::consts::TAU;

use super::CpgError;

/// Default table size used when encoding a shape from a closure.
pub const DEFAULT_SHAPE_SAMPLES: usize = 256;

/// Maximum allowed mismatch between the first and last sample of an input
/// trajectory before it is rejected as non-periodic (rad).
pub const PERIODICITY_TOLERANCE: f64 = 1e-6;

const MIN_SAMPLES: usize = 4;

/// A periodic function of phase, stored as a uniformly sampled table over
/// `[0, 2π)` and evaluated with a periodic cubic spline.
///
/// The spline's second-derivative table is computed once at construction so
/// both value and derivative evaluation are O(1).
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeFunction {
    values: Vec<f64>,
    second: Vec<f64>,
    step: f64,
}

impl ShapeFunction {
    /// Builds a shape from samples taken at phases `k·2π/n`, `k = 0..n`.
    pub fn from_periodic_samples(values: Vec<f64>) -> Result<Self, CpgError> {
        if values.len() < MIN_SAMPLES {
            return Err(CpgError::TooFewSamples {
                got: values.len(),
                min: MIN_SAMPLES,
            });
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(CpgError::NonFiniteSample(bad));
        }
        let step = TAU / values.len() as f64;
        let second = periodic_spline_second_derivatives(&values, step);
        Ok(Self {
            values,
            second,
            step,
        })
    }

    /// Samples `f` at `n` uniformly spaced phases.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self, CpgError> {
        let step = TAU / n as f64;
        Self::from_periodic_samples((0..n).map(|k| f(k as f64 * step)).collect())
    }

    pub fn constant(value: f64) -> Self {
        Self::from_periodic_samples(vec![value; MIN_SAMPLES]).expect("constant shape is valid")
    }

    /// Number of table entries.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.values
    }

    /// Value at `phase` (any real; wrapped internally).
    pub fn value(&self, phase: f64) -> f64 {
        let (i, j, t) = self.locate(phase);
        let u = 1.0 - t;
        let h2 = self.step * self.step / 6.0;
        u * self.values[i]
            + t * self.values[j]
            + h2 * ((u * u * u - u) * self.second[i] + (t * t * t - t) * self.second[j])
    }

    /// Derivative with respect to phase at `phase`.
    pub fn derivative(&self, phase: f64) -> f64 {
        let (i, j, t) = self.locate(phase);
        let u = 1.0 - t;
        (self.values[j] - self.values[i]) / self.step
            + self.step / 6.0
                * (-(3.0 * u * u - 1.0) * self.second[i] + (3.0 * t * t - 1.0) * self.second[j])
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    fn locate(&self, phase: f64) -> (usize, usize, f64) {
        let n = self.values.len();
        let u = phase.rem_euclid(TAU) / self.step;
        let base = u.floor();
        let i = (base as usize) % n;
        (i, (i + 1) % n, u - base)
    }
}

/// Encodes one period of a uniformly sampled joint trajectory as a shape.
///
/// `samples` must cover the closed interval `[0, 2π]`, so the last sample
/// repeats the first. The repeated endpoint is dropped after validation.
pub fn encode_trajectory(samples: &[f64]) -> Result<ShapeFunction, CpgError> {
    if samples.len() < MIN_SAMPLES + 1 {
        return Err(CpgError::TooFewSamples {
            got: samples.len(),
            min: MIN_SAMPLES + 1,
        });
    }
    let first = samples[0];
    let last = samples[samples.len() - 1];
    let mismatch = (last - first).abs();
    if !(mismatch <= PERIODICITY_TOLERANCE) {
        return Err(CpgError::NotPeriodic { mismatch });
    }
    ShapeFunction::from_periodic_samples(samples[..samples.len() - 1].to_vec())
}

/// Second derivatives of the periodic cubic spline through `y` on a uniform
/// grid. Solves the cyclic system `M[i-1] + 4 M[i] + M[i+1] = 6/h² Δ²y[i]`
/// with Sherman-Morrison on top of the Thomas algorithm.
fn periodic_spline_second_derivatives(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let rhs: Vec<f64> = (0..n)
        .map(|i| {
            let prev = y[(i + n - 1) % n];
            let next = y[(i + 1) % n];
            6.0 * (prev - 2.0 * y[i] + next) / (h * h)
        })
        .collect();

    // A = T + u vᵀ with corner terms folded into the first/last diagonal.
    let gamma = -4.0;
    let mut diag = vec![4.0; n];
    diag[0] -= gamma;
    diag[n - 1] -= 1.0 / gamma;

    let x = thomas(&diag, &rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = 1.0;
    let z = thomas(&diag, &u);

    let vx = x[0] + x[n - 1] / gamma;
    let vz = z[0] + z[n - 1] / gamma;
    let factor = vx / (1.0 + vz);
    x.iter().zip(&z).map(|(xi, zi)| xi - factor * zi).collect()
}

/// Tridiagonal solve with unit off-diagonals.
fn thomas(diag: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = 1.0 / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - c[i - 1];
        c[i] = 1.0 / m;
        d[i] = (rhs[i] - d[i - 1]) / m;
    }
    let mut out = vec![0.0; n];
    out[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        out[i] = d[i] - c[i] * out[i + 1];
    }
    out
}
