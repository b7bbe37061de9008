//! Grid-seeded multistart Nelder–Mead maximization of scenario correlators,
//! plus θ sweeps and threshold crossings built on top of it.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::correlators::{CorrelatorResult, ParamKind, Scenario, ScenarioKind};
use crate::{Error, Result};

/// Width in radians below which bisection stops.
pub const CROSSING_TOL: f64 = 1e-5;

/// Grid seeds past this many are replaced by a seeded random subsample of
/// grid points.
pub const DEFAULT_GRID_SEED_CAP: usize = 4096;

const REFINE_CYCLES: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub grid_points_per_dim: usize,
    pub restarts: usize,
    /// Absolute spread of simplex values at which a run stops.
    pub simplex_tolerance: f64,
    /// Iteration cap per simplex run.
    pub max_iterations: usize,
    pub rng_seed: u64,
    pub grid_seed_cap: usize,
    /// Number of best grid points handed to the simplex.
    pub grid_refinements: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            grid_points_per_dim: 5,
            restarts: 20,
            simplex_tolerance: 1e-10,
            max_iterations: 2000,
            rng_seed: 0,
            grid_seed_cap: DEFAULT_GRID_SEED_CAP,
            grid_refinements: 4,
        }
    }
}

impl OptimizerConfig {
    /// Cheaper settings for smoke runs.
    pub fn quick() -> Self {
        Self {
            grid_points_per_dim: 3,
            restarts: 4,
            grid_seed_cap: 512,
            grid_refinements: 2,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_points_per_dim < 3 {
            return Err(Error::InvalidInput(
                "grid_points_per_dim must be at least 3".into(),
            ));
        }
        if self.restarts < 1 {
            return Err(Error::InvalidInput("restarts must be at least 1".into()));
        }
        if !(self.simplex_tolerance.is_finite() && self.simplex_tolerance > 0.0) {
            return Err(Error::InvalidInput(
                "simplex_tolerance must be positive".into(),
            ));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidInput(
                "max_iterations must be positive".into(),
            ));
        }
        if self.grid_seed_cap == 0 {
            return Err(Error::InvalidInput("grid_seed_cap must be positive".into()));
        }
        Ok(())
    }
}

/// Counts evaluations and remembers the largest value seen.
struct Objective<'a> {
    scenario: &'a Scenario,
    evaluations: u64,
    peak: f64,
}

impl<'a> Objective<'a> {
    fn new(scenario: &'a Scenario) -> Self {
        Self {
            scenario,
            evaluations: 0,
            peak: f64::NEG_INFINITY,
        }
    }

    fn value(&mut self, x: &[f64]) -> Result<f64> {
        let v = self.scenario.evaluate(x)?;
        self.evaluations += 1;
        self.peak = self.peak.max(v);
        Ok(v)
    }
}

struct Run {
    x: Vec<f64>,
    value: f64,
    evaluations: u64,
    peak: f64,
}

/// Maximizes `obj` from `x0` with an adaptive-coefficient simplex.
fn nelder_mead(
    obj: &mut Objective,
    x0: &[f64],
    step: f64,
    tol: f64,
    max_iterations: usize,
) -> Result<(Vec<f64>, f64)> {
    let n = x0.len();
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

    // minimize the negated objective
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), -obj.value(x0)?));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let f = -obj.value(&x)?;
        simplex.push((x, f));
    }

    let toward = |from: &[f64], to: &[f64], t: f64| -> Vec<f64> {
        from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
    };

    for _ in 0..max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[n].1 - simplex[0].1 <= tol {
            break;
        }
        let mut c = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (ci, xi) in c.iter_mut().zip(x) {
                *ci += xi / nf;
            }
        }
        let worst = simplex[n].0.clone();
        let fw = simplex[n].1;

        let xr = toward(&c, &worst, -alpha);
        let fr = -obj.value(&xr)?;
        if fr < simplex[0].1 {
            let xe = toward(&c, &xr, beta);
            let fe = -obj.value(&xe)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < fw {
            let xc = toward(&c, &xr, gamma);
            let fc = -obj.value(&xc)?;
            (xc, fc)
        } else {
            let xc = toward(&c, &worst, gamma);
            let fc = -obj.value(&xc)?;
            (xc, fc)
        };
        if fc < fr.min(fw) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for v in simplex.iter_mut().skip(1) {
            v.0 = toward(&best, &v.0, delta);
            v.1 = -obj.value(&v.0)?;
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, f) = simplex.swap_remove(0);
    Ok((x, -f))
}

/// Repeated simplex runs from the current best point until they stop helping.
fn refine(scenario: &Scenario, x0: &[f64], config: &OptimizerConfig) -> Result<Run> {
    let mut obj = Objective::new(scenario);
    let mut x = x0.to_vec();
    let mut value = obj.value(&x)?;
    for cycle in 0..REFINE_CYCLES {
        let step = if cycle == 0 { 0.5 } else { 0.1 };
        let (nx, nv) = nelder_mead(
            &mut obj,
            &x,
            step,
            config.simplex_tolerance,
            config.max_iterations,
        )?;
        let gain = nv - value;
        if nv > value {
            x = nx;
            value = nv;
        }
        if cycle > 0 && gain <= config.simplex_tolerance {
            break;
        }
    }
    Ok(Run {
        x,
        value,
        evaluations: obj.evaluations,
        peak: obj.peak,
    })
}

fn grid_axis(kind: ParamKind, points: usize) -> Vec<f64> {
    match kind {
        ParamKind::Polar => (0..points)
            .map(|i| PI * i as f64 / (points - 1) as f64)
            .collect(),
        ParamKind::Phase | ParamKind::Azimuth => (0..points)
            .map(|i| TAU * i as f64 / points as f64)
            .collect(),
    }
}

/// Seeding grid: the full tensor grid when small enough, else a seeded
/// subsample of its points.
fn seed_grid(kind: ScenarioKind, config: &OptimizerConfig, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> = kind
        .layout()
        .iter()
        .map(|p| grid_axis(p.kind, config.grid_points_per_dim))
        .collect();
    let g = config.grid_points_per_dim;
    let total = (g as f64).powi(axes.len() as i32);
    if total <= config.grid_seed_cap as f64 {
        (0..total as usize)
            .map(|mut idx| {
                let mut x = vec![0.0; axes.len()];
                for (d, axis) in axes.iter().enumerate().rev() {
                    x[d] = axis[idx % g];
                    idx /= g;
                }
                x
            })
            .collect()
    } else {
        (0..config.grid_seed_cap)
            .map(|_| axes.iter().map(|a| a[rng.random_range(0..g)]).collect())
            .collect()
    }
}

fn random_point(kind: ScenarioKind, rng: &mut ChaCha8Rng) -> Vec<f64> {
    kind.layout()
        .iter()
        .map(|p| {
            let (lo, hi) = p.kind.range();
            rng.random_range(lo..hi)
        })
        .collect()
}

/// Best value found over the grid seeds alone.
pub fn grid_seed_maximum(scenario: &Scenario, config: &OptimizerConfig) -> Result<f64> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let seeds = seed_grid(scenario.kind(), config, &mut rng);
    let values: Result<Vec<f64>> = seeds.par_iter().map(|x| scenario.evaluate(x)).collect();
    Ok(values?.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

pub fn maximize(scenario: &Scenario, config: &OptimizerConfig) -> Result<CorrelatorResult> {
    maximize_with_warm_start(scenario, config, None)
}

/// Like [`maximize`], with `warm` added as one more simplex start.
pub fn maximize_with_warm_start(
    scenario: &Scenario,
    config: &OptimizerConfig,
    warm: Option<&[f64]>,
) -> Result<CorrelatorResult> {
    config.validate()?;
    let kind = scenario.kind();
    if let Some(w) = warm {
        if w.len() != kind.dimension() {
            return Err(Error::DimensionMismatch {
                expected: kind.dimension(),
                got: w.len(),
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);

    let seeds = seed_grid(kind, config, &mut rng);
    let seed_values: Result<Vec<f64>> = seeds.par_iter().map(|x| scenario.evaluate(x)).collect();
    let seed_values = seed_values?;
    let mut evaluations = seeds.len() as u64;
    let mut peak = seed_values
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);

    let mut order: Vec<usize> = (0..seeds.len()).collect();
    order.sort_by(|&a, &b| seed_values[b].total_cmp(&seed_values[a]).then(a.cmp(&b)));

    let mut starts: Vec<Vec<f64>> = order
        .iter()
        .take(config.grid_refinements)
        .map(|&i| seeds[i].clone())
        .collect();
    if let Some(w) = warm {
        starts.push(w.to_vec());
    }
    for _ in 0..config.restarts {
        starts.push(random_point(kind, &mut rng));
    }

    let runs: Result<Vec<Run>> = starts
        .par_iter()
        .map(|x0| refine(scenario, x0, config))
        .collect();
    let runs = runs?;

    let mut best_x = seeds[order[0]].clone();
    let mut best = seed_values[order[0]];
    for run in &runs {
        evaluations += run.evaluations;
        peak = peak.max(run.peak);
        if run.value > best {
            best = run.value;
            best_x = run.x.clone();
        }
    }

    let mut finals: Vec<f64> = runs.iter().map(|r| r.value).collect();
    finals.sort_by(|a, b| b.total_cmp(a));
    let converged = finals.len() >= 2 && finals[0] - finals[1] <= 10.0 * config.simplex_tolerance;

    Ok(CorrelatorResult {
        scenario: *scenario,
        value: best,
        settings: scenario.canonicalize(&best_x),
        evaluations,
        converged,
        peak_evaluated: peak,
    })
}

/// Final values of every simplex start, best first.
pub fn restart_values(scenario: &Scenario, config: &OptimizerConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let kind = scenario.kind();
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let _ = seed_grid(kind, config, &mut rng);
    let starts: Vec<Vec<f64>> = (0..config.restarts)
        .map(|_| random_point(kind, &mut rng))
        .collect();
    let runs: Result<Vec<Run>> = starts
        .par_iter()
        .map(|x0| refine(scenario, x0, config))
        .collect();
    let mut values: Vec<f64> = runs?.into_iter().map(|r| r.value).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub kind: ScenarioKind,
    pub theta_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub points: Vec<CorrelatorResult>,
}

impl SweepResult {
    pub fn all_converged(&self) -> bool {
        self.points.iter().all(|p| p.converged)
    }

    pub fn peak_evaluated(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.peak_evaluated)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `steps` evenly spaced angles from `theta_min` to `theta_max` inclusive.
pub fn theta_grid(theta_min: f64, theta_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(theta_min.is_finite() && theta_max.is_finite()) {
        return Err(Error::NonFinite("theta range"));
    }
    if theta_min < 0.0 || theta_max > FRAC_PI_4 + 1e-12 || theta_min >= theta_max {
        return Err(Error::InvalidInput(format!(
            "need 0 <= theta_min < theta_max <= pi/4, got [{theta_min}, {theta_max}]"
        )));
    }
    if steps < 2 {
        return Err(Error::InvalidInput("steps must be at least 2".into()));
    }
    let theta_max = theta_max.min(FRAC_PI_4);
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i + 1 == steps {
                theta_max
            } else {
                theta_min + (theta_max - theta_min) * (i as f64 / last)
            }
        })
        .collect())
}

/// Maximizes at each grid angle, seeding each point with the previous optimum.
pub fn sweep(
    kind: ScenarioKind,
    theta_min: f64,
    theta_max: f64,
    steps: usize,
    config: &OptimizerConfig,
) -> Result<SweepResult> {
    sweep_with(kind, theta_min, theta_max, steps, config, true)
}

pub fn sweep_with(
    kind: ScenarioKind,
    theta_min: f64,
    theta_max: f64,
    steps: usize,
    config: &OptimizerConfig,
    warm_start: bool,
) -> Result<SweepResult> {
    config.validate()?;
    let grid = theta_grid(theta_min, theta_max, steps)?;
    let mut points: Vec<CorrelatorResult> = Vec::with_capacity(grid.len());
    for &theta in &grid {
        let scenario = Scenario::new(kind, theta)?;
        let warm = if warm_start {
            points.last().map(|p| p.settings.0.clone())
        } else {
            None
        };
        points.push(maximize_with_warm_start(
            &scenario,
            config,
            warm.as_deref(),
        )?);
    }
    Ok(SweepResult {
        kind,
        values: points.iter().map(|p| p.value).collect(),
        theta_grid: grid,
        points,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Crossing {
    Found {
        theta: f64,
        /// Final bracket width.
        width: f64,
        evaluations: u64,
        peak_evaluated: f64,
    },
    /// Level not bracketed by the values at `0` and `π/4`.
    NoCrossing {
        level: f64,
        low: f64,
        high: f64,
        peak_evaluated: f64,
    },
}

impl Crossing {
    pub fn theta(&self) -> Option<f64> {
        match self {
            Crossing::Found { theta, .. } => Some(*theta),
            Crossing::NoCrossing { .. } => None,
        }
    }

    pub fn peak_evaluated(&self) -> f64 {
        match self {
            Crossing::Found { peak_evaluated, .. }
            | Crossing::NoCrossing { peak_evaluated, .. } => *peak_evaluated,
        }
    }
}

/// Bisection on `maximize(θ) − level` over `[0, π/4]`.
pub fn find_crossing(kind: ScenarioKind, level: f64, config: &OptimizerConfig) -> Result<Crossing> {
    if !level.is_finite() {
        return Err(Error::NonFinite("level"));
    }
    config.validate()?;
    let mut evaluations = 0;
    let mut peak = f64::NEG_INFINITY;
    let mut at = |theta: f64| -> Result<f64> {
        let r = maximize(&Scenario::new(kind, theta)?, config)?;
        evaluations += r.evaluations;
        peak = peak.max(r.peak_evaluated);
        Ok(r.value - level)
    };
    let (mut lo, mut hi) = (0.0, FRAC_PI_4);
    let g_lo = at(lo)?;
    let g_hi = at(hi)?;
    if g_lo == 0.0 || g_hi == 0.0 || g_lo.signum() == g_hi.signum() {
        let exact = if g_lo == 0.0 {
            Some(lo)
        } else if g_hi == 0.0 {
            Some(hi)
        } else {
            None
        };
        return Ok(match exact {
            Some(theta) => Crossing::Found {
                theta,
                width: 0.0,
                evaluations,
                peak_evaluated: peak,
            },
            None => Crossing::NoCrossing {
                level,
                low: g_lo + level,
                high: g_hi + level,
                peak_evaluated: peak,
            },
        });
    }
    let lo_sign = g_lo.signum();
    while hi - lo >= CROSSING_TOL {
        let mid = 0.5 * (lo + hi);
        let g = at(mid)?;
        if g.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Crossing::Found {
        theta: 0.5 * (lo + hi),
        width: hi - lo,
        evaluations,
        peak_evaluated: peak,
    })
}
