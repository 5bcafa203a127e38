//! Bounded-box particle swarm maximizer with deterministic per-particle
//! random streams.
//!
//! Objective evaluations inside one iteration run in parallel; every
//! reduction happens in particle order, so the result depends only on the
//! seed and never on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoConfig {
    pub swarm_size: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Number of independent swarms; the best one wins.
    pub restarts: usize,
    pub seed: u64,
    /// Maximum speed per dimension as a fraction of the box width.
    pub velocity_clamp: f64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            swarm_size: 50,
            iterations: 200,
            inertia: 0.7298,
            cognitive: 1.49618,
            social: 1.49618,
            restarts: 3,
            seed: 0,
            velocity_clamp: 0.5,
        }
    }
}

impl PsoConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(format!("PSO config: {m}")));
        if self.swarm_size < 2 {
            return bad("swarm_size must be at least 2");
        }
        if self.iterations < 1 {
            return bad("iterations must be at least 1");
        }
        if self.restarts < 1 {
            return bad("restarts must be at least 1");
        }
        let coeffs = [self.inertia, self.cognitive, self.social, self.velocity_clamp];
        if coeffs.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return bad("coefficients must be positive and finite");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dimension {
    pub lo: f64,
    pub hi: f64,
    /// Periodic dimensions wrap around instead of reflecting.
    pub periodic: bool,
}

impl Dimension {
    fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Signed displacement from `from` to `to`, the short way round if periodic.
    fn delta(&self, from: f64, to: f64) -> f64 {
        let d = to - from;
        if self.periodic {
            let w = self.width();
            d - w * (d / w).round()
        } else {
            d
        }
    }

    /// Maps a position back into the box; returns whether velocity flips.
    fn confine(&self, x: f64) -> (f64, bool) {
        if self.periodic {
            let w = self.width();
            let mut y = self.lo + (x - self.lo).rem_euclid(w);
            if y >= self.hi {
                y = self.lo;
            }
            return (y, false);
        }
        if x >= self.lo && x <= self.hi {
            return (x, false);
        }
        let w = self.width();
        // reflect with period 2w
        let t = (x - self.lo).rem_euclid(2.0 * w);
        let y = if t <= w { self.lo + t } else { self.hi - (t - w) };
        (y.clamp(self.lo, self.hi), true)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxBounds {
    dims: Vec<Dimension>,
}

impl BoxBounds {
    pub fn new(ranges: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let dims: Vec<Dimension> = ranges.into_iter().map(|(lo, hi)| Dimension { lo, hi, periodic: false }).collect();
        Self::from_dimensions(dims)
    }

    pub fn from_dimensions(dims: Vec<Dimension>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidArgument("box must have at least one dimension".into()));
        }
        for (k, d) in dims.iter().enumerate() {
            if !(d.lo.is_finite() && d.hi.is_finite() && d.lo < d.hi) {
                return Err(Error::InvalidArgument(format!("dimension {k}: need finite lo < hi, got [{}, {}]", d.lo, d.hi)));
            }
        }
        Ok(Self { dims })
    }

    pub fn with_periodic(mut self, dim: usize) -> Self {
        self.dims[dim].periodic = true;
        self
    }

    pub fn dims(&self) -> &[Dimension] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dims.len() && x.iter().zip(&self.dims).all(|(v, d)| *v >= d.lo && *v <= d.hi)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsoResult {
    pub best_value: f64,
    pub best_point: Vec<f64>,
    /// Best-so-far value after initialization and after each iteration,
    /// one list per restart.
    pub trajectories: Vec<Vec<f64>>,
    /// Index of the restart that produced the optimum.
    pub best_restart: usize,
    pub evaluations: usize,
}

/// splitmix64 finalizer, used to derive independent restart seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn sanitize(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        log::warn!("objective returned non-finite value {v}; treating as -inf");
        f64::NEG_INFINITY
    }
}

/// Maximizes `objective` over `bounds`.
pub fn maximize<F>(objective: F, bounds: &BoxBounds, cfg: &PsoConfig) -> Result<PsoResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    cfg.validate()?;
    let mut best: Option<(f64, Vec<f64>, usize)> = None;
    let mut trajectories = Vec::with_capacity(cfg.restarts);
    let mut evaluations = 0;
    for r in 0..cfg.restarts {
        let (value, point, traj, evals) = run_swarm(&objective, bounds, cfg, mix(cfg.seed ^ mix(r as u64)));
        evaluations += evals;
        trajectories.push(traj);
        // strict comparison: earlier restart wins ties
        if best.as_ref().is_none_or(|(v, _, _)| value > *v) {
            best = Some((value, point, r));
        }
    }
    let (best_value, best_point, best_restart) = best.expect("at least one restart");
    if !best_value.is_finite() {
        return Err(Error::Numerical("objective was non-finite everywhere the swarm looked".into()));
    }
    Ok(PsoResult { best_value, best_point, trajectories, best_restart, evaluations })
}

struct Particle {
    rng: ChaCha8Rng,
    x: Vec<f64>,
    v: Vec<f64>,
    best_x: Vec<f64>,
    best_f: f64,
}

fn run_swarm<F>(objective: &F, bounds: &BoxBounds, cfg: &PsoConfig, seed: u64) -> (f64, Vec<f64>, Vec<f64>, usize)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let dims = bounds.dims();
    let vmax: Vec<f64> = dims.iter().map(|d| cfg.velocity_clamp * d.width()).collect();
    let mut swarm: Vec<Particle> = (0..cfg.swarm_size)
        .map(|p| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(p as u64);
            let x: Vec<f64> = dims.iter().map(|d| rng.random_range(d.lo..d.hi)).collect();
            let v: Vec<f64> = vmax.iter().map(|&m| rng.random_range(-m..m)).collect();
            Particle { rng, best_x: x.clone(), x, v, best_f: f64::NEG_INFINITY }
        })
        .collect();

    let evaluate = |swarm: &[Particle]| -> Vec<f64> { swarm.par_iter().map(|p| sanitize(objective(&p.x))).collect() };

    let mut g_f = f64::NEG_INFINITY;
    let mut g_x = swarm[0].x.clone();
    let mut traj = Vec::with_capacity(cfg.iterations + 1);
    let mut evals = 0;

    for it in 0..=cfg.iterations {
        if it > 0 {
            for p in swarm.iter_mut() {
                for k in 0..dims.len() {
                    let r1: f64 = p.rng.random();
                    let r2: f64 = p.rng.random();
                    let d = &dims[k];
                    let pull_self = d.delta(p.x[k], p.best_x[k]);
                    let pull_swarm = d.delta(p.x[k], g_x[k]);
                    let v = cfg.inertia * p.v[k] + cfg.cognitive * r1 * pull_self + cfg.social * r2 * pull_swarm;
                    p.v[k] = v.clamp(-vmax[k], vmax[k]);
                    let (x, flip) = d.confine(p.x[k] + p.v[k]);
                    p.x[k] = x;
                    if flip {
                        p.v[k] = -p.v[k];
                    }
                }
            }
        }
        let values = evaluate(&swarm);
        evals += values.len();
        for (p, &f) in swarm.iter_mut().zip(&values) {
            if f > p.best_f {
                p.best_f = f;
                p.best_x.clone_from(&p.x);
            }
        }
        // lowest index wins ties
        for p in &swarm {
            if p.best_f > g_f {
                g_f = p.best_f;
                g_x.clone_from(&p.best_x);
            }
        }
        traj.push(g_f);
    }
    (g_f, g_x, traj, evals)
}
