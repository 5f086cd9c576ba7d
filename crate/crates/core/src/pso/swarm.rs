use std::io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::PsoError;

#[derive(Debug, Clone, PartialEq)]
pub struct Bound {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    bounds: Vec<Bound>,
}

impl SearchSpace {
    pub fn new(bounds: Vec<Bound>) -> Result<Self, PsoError> {
        if bounds.is_empty() {
            return Err(PsoError::InvalidSpace("no dimensions".into()));
        }
        for b in &bounds {
            if !(b.lower.is_finite() && b.upper.is_finite() && b.lower < b.upper) {
                return Err(PsoError::InvalidSpace(format!(
                    "{}: lower {} must be below upper {}",
                    b.name, b.lower, b.upper
                )));
            }
        }
        Ok(Self { bounds })
    }

    /// Same bounds on every axis, named `x0, x1, ...`.
    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self, PsoError> {
        Self::new(
            (0..dim)
                .map(|i| Bound {
                    name: format!("x{i}"),
                    lower,
                    upper,
                })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[Bound] {
        &self.bounds
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(&self.bounds)
                .all(|(v, b)| *v >= b.lower && *v <= b.upper)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwarmConfig {
    pub particles: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub seed: u64,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        Self {
            particles: 30,
            iterations: 200,
            inertia: 0.7298,
            cognitive: 1.49618,
            social: 1.49618,
            seed: 0,
        }
    }
}

impl SwarmConfig {
    pub fn validate(&self) -> Result<(), PsoError> {
        let bad = |m: &str| Err(PsoError::InvalidConfig(m.into()));
        if self.particles == 0 {
            return bad("particles must be >= 1");
        }
        if !(0.0..1.0).contains(&self.inertia) {
            return bad("inertia must be in [0, 1)");
        }
        if !(self.cognitive >= 0.0 && self.social >= 0.0) {
            return bad("acceleration coefficients must be >= 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

impl Sense {
    /// Internal cost (lower is better); NaN ranks worst.
    fn cost(self, score: f64) -> f64 {
        let c = match self {
            Sense::Minimize => score,
            Sense::Maximize => -score,
        };
        if c.is_nan() {
            f64::INFINITY
        } else {
            c
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    /// Global best score after the iteration.
    pub best: f64,
    /// Mean of the finite scores evaluated in the iteration.
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoResult {
    pub best_position: Vec<f64>,
    pub best_score: f64,
    pub trace: Vec<TraceRow>,
}

/// Starting positions and velocities, one row per particle.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialSwarm {
    pub positions: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
}

/// Particle swarm state; one update per [`Swarm::step`].
#[derive(Debug, Clone)]
pub struct Swarm {
    space: SearchSpace,
    cfg: SwarmConfig,
    sense: Sense,
    rngs: Vec<ChaCha8Rng>,
    positions: Vec<Vec<f64>>,
    velocities: Vec<Vec<f64>>,
    personal: Vec<Vec<f64>>,
    personal_cost: Vec<f64>,
    best: usize,
    iteration: usize,
}

fn evaluate<F>(objective: &F, positions: &[Vec<f64>]) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    positions.par_iter().map(|x| objective(x)).collect()
}

fn finite_mean(scores: &[f64]) -> f64 {
    let finite: Vec<f64> = scores.iter().copied().filter(|s| s.is_finite()).collect();
    if finite.is_empty() {
        f64::NAN
    } else {
        finite.iter().sum::<f64>() / finite.len() as f64
    }
}

impl Swarm {
    /// Initializes the swarm and evaluates the starting positions.
    pub fn new<F>(
        objective: &F,
        space: SearchSpace,
        cfg: SwarmConfig,
        sense: Sense,
        init: Option<InitialSwarm>,
    ) -> Result<Self, PsoError>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        cfg.validate()?;
        let dim = space.dim();
        let mut rngs: Vec<ChaCha8Rng> = (0..cfg.particles)
            .map(|i| {
                let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
                r.set_stream(i as u64);
                r
            })
            .collect();
        let (positions, velocities) = match init {
            Some(init) => {
                let ok_shape = |rows: &Vec<Vec<f64>>| {
                    rows.len() == cfg.particles && rows.iter().all(|r| r.len() == dim)
                };
                if !ok_shape(&init.positions) || !ok_shape(&init.velocities) {
                    return Err(PsoError::DimensionMismatch);
                }
                if !init.positions.iter().all(|p| space.contains(p)) {
                    return Err(PsoError::InvalidConfig(
                        "initial position out of bounds".into(),
                    ));
                }
                (init.positions, init.velocities)
            }
            None => rngs
                .iter_mut()
                .map(|rng| {
                    space
                        .bounds()
                        .iter()
                        .map(|b| {
                            let span = b.upper - b.lower;
                            let x = b.lower + rng.gen::<f64>() * span;
                            let v = (rng.gen::<f64>() - 0.5) * span;
                            (x, v)
                        })
                        .unzip()
                })
                .unzip(),
        };
        let personal_cost: Vec<f64> = evaluate(objective, &positions)
            .into_iter()
            .map(|s| sense.cost(s))
            .collect();
        let mut swarm = Self {
            space,
            cfg,
            sense,
            rngs,
            personal: positions.clone(),
            positions,
            velocities,
            personal_cost,
            best: 0,
            iteration: 0,
        };
        swarm.update_global();
        Ok(swarm)
    }

    fn update_global(&mut self) {
        let mut best = 0;
        for i in 1..self.personal_cost.len() {
            if self.personal_cost[i] < self.personal_cost[best] {
                best = i;
            }
        }
        self.best = best;
    }

    fn score_of(&self, cost: f64) -> f64 {
        match self.sense {
            Sense::Minimize => cost,
            Sense::Maximize => -cost,
        }
    }

    /// One velocity/position update, evaluation and best-position update.
    pub fn step<F>(&mut self, objective: &F) -> TraceRow
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let g = self.personal[self.best].clone();
        let (w, c1, c2) = (self.cfg.inertia, self.cfg.cognitive, self.cfg.social);
        for i in 0..self.positions.len() {
            let rng = &mut self.rngs[i];
            let x = &mut self.positions[i];
            let v = &mut self.velocities[i];
            let p = &self.personal[i];
            for (d, b) in self.space.bounds.iter().enumerate() {
                let vmax = b.upper - b.lower;
                let (r1, r2): (f64, f64) = (rng.gen(), rng.gen());
                let nv = w * v[d] + c1 * r1 * (p[d] - x[d]) + c2 * r2 * (g[d] - x[d]);
                v[d] = nv.clamp(-vmax, vmax);
                x[d] += v[d];
                if x[d] < b.lower || x[d] > b.upper {
                    x[d] = x[d].clamp(b.lower, b.upper);
                    v[d] = 0.0;
                }
            }
        }
        let scores = evaluate(objective, &self.positions);
        for (i, &s) in scores.iter().enumerate() {
            let c = self.sense.cost(s);
            if c < self.personal_cost[i] {
                self.personal_cost[i] = c;
                self.personal[i] = self.positions[i].clone();
            }
        }
        self.update_global();
        self.iteration += 1;
        TraceRow {
            iteration: self.iteration,
            best: self.best_score(),
            mean: finite_mean(&scores),
        }
    }

    pub fn positions(&self) -> &[Vec<f64>] {
        &self.positions
    }

    pub fn velocities(&self) -> &[Vec<f64>] {
        &self.velocities
    }

    pub fn best_position(&self) -> &[f64] {
        &self.personal[self.best]
    }

    pub fn best_score(&self) -> f64 {
        self.score_of(self.personal_cost[self.best])
    }
}

/// Runs `cfg.iterations` swarm updates from a seeded random start.
pub fn optimize<F>(
    objective: F,
    space: &SearchSpace,
    cfg: &SwarmConfig,
    sense: Sense,
) -> Result<PsoResult, PsoError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    optimize_from(objective, space, cfg, sense, None)
}

pub fn optimize_from<F>(
    objective: F,
    space: &SearchSpace,
    cfg: &SwarmConfig,
    sense: Sense,
    init: Option<InitialSwarm>,
) -> Result<PsoResult, PsoError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let mut swarm = Swarm::new(&objective, space.clone(), *cfg, sense, init)?;
    let trace = (0..cfg.iterations)
        .map(|_| swarm.step(&objective))
        .collect();
    Ok(PsoResult {
        best_position: swarm.best_position().to_vec(),
        best_score: swarm.best_score(),
        trace,
    })
}

pub fn write_trace_csv<W: io::Write>(out: W, trace: &[TraceRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["iteration", "best_score", "mean_score"])?;
    for r in trace {
        w.write_record([
            r.iteration.to_string(),
            format!("{:.9}", r.best),
            format!("{:.9}", r.mean),
        ])?;
    }
    w.flush()?;
    Ok(())
}
