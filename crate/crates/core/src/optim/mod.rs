//! Derivative-free variational optimization with multi-start.
//!
//! [`minimize`] is a linear-model trust-region method in the style of
//! COBYLA without constraints: it keeps a simplex of `n + 1` evaluated
//! points, interpolates a linear model through them, steps a distance
//! `rho` downhill, and halves `rho` from `initial_step` to
//! `final_tolerance` when steps stop paying off.
//!
//! Iteration accounting: iteration 1 evaluates the start, iteration 2 the
//! `n` initial simplex vertices, and each later iteration takes one
//! trust-region step plus at most one geometry-repair evaluation. Radius
//! reductions alone do not count as iterations. A model that is exactly
//! flat over the simplex ends the run.

mod linalg;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Parallelism;

/// A step whose actual/predicted reduction falls below this is poor.
const POOR_RATIO: f64 = 0.1;
/// Vertices farther than this many radii from the best are too far.
const FAR_FACTOR: f64 = 2.1;
/// Vertices closer than this many radii to the opposite face are too flat.
const FLAT_FACTOR: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub max_iterations: usize,
    pub initial_step: f64,
    pub final_tolerance: f64,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            initial_step: 0.5,
            final_tolerance: 1e-4,
            seed: 0,
            restarts: 10,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be at least 1"));
        }
        if !(self.initial_step > 0.0 && self.final_tolerance > 0.0) {
            return Err(Error::invalid("initial_step and final_tolerance must be positive"));
        }
        if self.final_tolerance > self.initial_step {
            return Err(Error::invalid("final_tolerance must not exceed initial_step"));
        }
        if self.restarts == 0 {
            return Err(Error::invalid("restarts must be at least 1"));
        }
        Ok(())
    }
}

/// One objective call as seen by the optimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord<S> {
    pub params: Vec<f64>,
    pub value: f64,
    /// Iteration (1-based) in which the call was made.
    pub iteration: usize,
    pub snapshot: S,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace<S> {
    pub evaluations: Vec<EvalRecord<S>>,
    pub iterations_used: usize,
    pub best_params: Vec<f64>,
    pub best_objective: f64,
    /// Index into `evaluations` of the first call attaining the best value.
    pub best_index: usize,
    /// Set when the objective returned a non-finite value.
    pub failed: bool,
}

impl<S> RunTrace<S> {
    /// Best value among the first `k` evaluations, for every `k`.
    pub fn running_best(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.evaluations
            .iter()
            .map(|e| {
                if e.value < best {
                    best = e.value;
                }
                best
            })
            .collect()
    }
}

struct Run<'a, S, F> {
    objective: &'a mut F,
    max_iterations: usize,
    iteration: usize,
    evaluations: Vec<EvalRecord<S>>,
    failed: bool,
}

impl<S, F: FnMut(&[f64]) -> (f64, S)> Run<'_, S, F> {
    /// Evaluates `x`; `None` once the objective has failed.
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        let (value, snapshot) = (self.objective)(x);
        self.evaluations.push(EvalRecord {
            params: x.to_vec(),
            value,
            iteration: self.iteration,
            snapshot,
        });
        if value.is_finite() {
            Some(value)
        } else {
            self.failed = true;
            None
        }
    }

    fn begin_iteration(&mut self) -> bool {
        if self.iteration >= self.max_iterations {
            return false;
        }
        self.iteration += 1;
        true
    }
}

struct Simplex {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    best: usize,
}

impl Simplex {
    fn others(&self) -> Vec<usize> {
        (0..self.points.len()).filter(|&i| i != self.best).collect()
    }

    /// Rows `x_i − x_best` over the non-best vertices, in `others()` order.
    fn offsets(&self, others: &[usize]) -> Vec<Vec<f64>> {
        others
            .iter()
            .map(|&i| linalg::sub(&self.points[i], &self.points[self.best]))
            .collect()
    }

    fn insert(&mut self, slot: usize, x: Vec<f64>, f: f64) {
        self.points[slot] = x;
        self.values[slot] = f;
        if f < self.values[self.best] {
            self.best = slot;
        }
    }
}

/// Runs one local optimization from `start`.
///
/// `objective` returns the value to minimize and a snapshot stored with the
/// evaluation record.
pub fn minimize<S, F>(mut objective: F, cfg: &OptimizerConfig, start: &[f64]) -> Result<RunTrace<S>>
where
    F: FnMut(&[f64]) -> (f64, S),
{
    cfg.validate()?;
    if start.is_empty() {
        return Err(Error::invalid("start point must have at least one parameter"));
    }
    let n = start.len();
    let rho_end = cfg.final_tolerance;
    let mut rho = cfg.initial_step;
    let mut run = Run {
        objective: &mut objective,
        max_iterations: cfg.max_iterations,
        iteration: 0,
        evaluations: Vec::new(),
        failed: false,
    };

    'outer: {
        run.begin_iteration();
        let Some(f0) = run.eval(start) else { break 'outer };
        if !run.begin_iteration() {
            break 'outer;
        }
        let mut simplex = Simplex {
            points: vec![start.to_vec()],
            values: vec![f0],
            best: 0,
        };
        for i in 0..n {
            let mut x = start.to_vec();
            x[i] += rho;
            let Some(f) = run.eval(&x) else { break 'outer };
            simplex.points.push(x);
            simplex.values.push(f);
            if f < simplex.values[simplex.best] {
                simplex.best = i + 1;
            }
        }

        loop {
            let others = simplex.others();
            let inv = linalg::invert(&simplex.offsets(&others));
            let Some(inv) = inv else {
                // Degenerate simplex: rebuild it around the best point.
                if !run.begin_iteration() {
                    break 'outer;
                }
                let base = simplex.points[simplex.best].clone();
                let fb = simplex.values[simplex.best];
                simplex = Simplex {
                    points: vec![base.clone()],
                    values: vec![fb],
                    best: 0,
                };
                for i in 0..n {
                    let mut x = base.clone();
                    x[i] += rho;
                    let Some(f) = run.eval(&x) else { break 'outer };
                    simplex.insert_new(x, f);
                }
                continue;
            };
            let fbest = simplex.values[simplex.best];
            let df: Vec<f64> = others.iter().map(|&i| simplex.values[i] - fbest).collect();
            let grad = linalg::mat_vec(&inv, &df);
            let gnorm = linalg::norm(&grad);

            if gnorm == 0.0 {
                // Exactly flat over the simplex: no descent direction at any radius.
                break 'outer;
            }
            let mut poor = true;
            let mut stepped = false;
            if gnorm > 0.0 && gnorm.is_finite() {
                if !run.begin_iteration() {
                    break 'outer;
                }
                stepped = true;
                let step: Vec<f64> = grad.iter().map(|g| -rho * g / gnorm).collect();
                let x = linalg::add(&simplex.points[simplex.best], &step);
                let Some(f) = run.eval(&x) else { break 'outer };
                let ratio = (fbest - f) / (rho * gnorm);
                poor = !(ratio >= POOR_RATIO);
                // λ solves Σ λ_i (x_i − x_best) = step.
                let lambda = linalg::mat_t_vec(&inv, &step);
                let scores: Vec<f64> = others
                    .iter()
                    .zip(&lambda)
                    .map(|(&i, l)| {
                        let dist = linalg::dist(&simplex.points[i], &x);
                        l.abs() * (dist / rho).max(1.0)
                    })
                    .collect();
                let (k, score) = linalg::argmax(&scores);
                if f < fbest || score > 1.0 {
                    simplex.insert(others[k], x, f);
                }
            }

            if !poor {
                continue;
            }

            // Poor or no step: repair geometry if needed, else shrink.
            let others = simplex.others();
            let offsets = simplex.offsets(&others);
            let repair = linalg::invert(&offsets).map(|inv| {
                let dists: Vec<f64> = offsets.iter().map(|o| linalg::norm(o)).collect();
                let (far, far_d) = linalg::argmax(&dists);
                if far_d > FAR_FACTOR * rho {
                    return Some(far);
                }
                // Column i of the inverse is normal to the face opposite vertex i.
                let sigmas: Vec<f64> = (0..n)
                    .map(|i| 1.0 / linalg::norm(&linalg::column(&inv, i)))
                    .collect();
                let (flat, s) = linalg::argmin(&sigmas);
                (s < FLAT_FACTOR * rho).then_some(flat)
            });
            match repair {
                Some(Some(k)) => {
                    if !stepped && !run.begin_iteration() {
                        break 'outer;
                    }
                    let inv = linalg::invert(&offsets).expect("checked above");
                    let normal = linalg::column(&inv, k);
                    let nn = linalg::norm(&normal);
                    let fbest = simplex.values[simplex.best];
                    let df: Vec<f64> = others.iter().map(|&i| simplex.values[i] - fbest).collect();
                    let grad = linalg::mat_vec(&inv, &df);
                    let sign = if linalg::dot(&grad, &normal) > 0.0 { -1.0 } else { 1.0 };
                    let step: Vec<f64> = normal.iter().map(|v| sign * rho * v / nn).collect();
                    let x = linalg::add(&simplex.points[simplex.best], &step);
                    let Some(f) = run.eval(&x) else { break 'outer };
                    simplex.insert(others[k], x, f);
                }
                Some(None) => {
                    if rho <= rho_end {
                        break 'outer;
                    }
                    rho *= 0.5;
                    if rho <= 1.5 * rho_end {
                        rho = rho_end;
                    }
                }
                None => {
                    // Singular after the update; the rebuild branch handles it.
                }
            }
        }
    }

    let iterations_used = run.iteration;
    let failed = run.failed;
    let evaluations = run.evaluations;
    let mut best_index = 0;
    let mut best_objective = evaluations[0].value;
    for (i, e) in evaluations.iter().enumerate() {
        if e.value < best_objective || (!best_objective.is_finite() && e.value.is_finite()) {
            best_objective = e.value;
            best_index = i;
        }
    }
    Ok(RunTrace {
        best_params: evaluations[best_index].params.clone(),
        best_objective,
        best_index,
        iterations_used,
        failed,
        evaluations,
    })
}

impl Simplex {
    fn insert_new(&mut self, x: Vec<f64>, f: f64) {
        self.points.push(x);
        self.values.push(f);
        if f < self.values[self.best] {
            self.best = self.points.len() - 1;
        }
    }
}

/// Start point of restart `r`: `γ ∈ [0, 2π)`, `β ∈ [0, π)` from a child
/// stream of `cfg.seed`. Layout is `[γ_1..γ_p, β_1..β_p]`.
pub fn restart_start(seed: u64, depth: usize, restart: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    let mut x = Vec::with_capacity(2 * depth);
    for _ in 0..depth {
        x.push(rng.gen_range(0.0..2.0 * PI));
    }
    for _ in 0..depth {
        x.push(rng.gen_range(0.0..PI));
    }
    x
}

/// Runs `cfg.restarts` independent local optimizations at depth `depth`.
pub fn multi_start<S, F>(objective: F, depth: usize, cfg: &OptimizerConfig, par: Parallelism) -> Result<Vec<RunTrace<S>>>
where
    S: Send,
    F: Fn(&[f64]) -> (f64, S) + Sync,
{
    cfg.validate()?;
    if depth == 0 {
        return Err(Error::invalid("depth must be at least 1"));
    }
    par.map_range(cfg.restarts, |r| {
        let start = restart_start(cfg.seed, depth, r);
        minimize(&objective, cfg, &start)
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bowl(x: &[f64]) -> (f64, ()) {
        ((x[0] - 1.0).powi(2) + (x[1] + 2.0).powi(2), ())
    }

    #[test]
    fn constant_objective_stops_quickly() {
        let cfg = OptimizerConfig::default();
        let t = minimize(|_: &[f64]| (3.5, ()), &cfg, &[0.1, 0.2]).unwrap();
        assert_eq!(t.best_objective, 3.5);
        assert!(t.iterations_used <= 4, "{}", t.iterations_used);
        assert!(!t.failed);
    }

    #[test]
    fn bowl_converges() {
        let cfg = OptimizerConfig::default();
        let t = minimize(bowl, &cfg, &[0.0, 0.0]).unwrap();
        assert!((t.best_params[0] - 1.0).abs() < 1e-2, "{:?}", t.best_params);
        assert!((t.best_params[1] + 2.0).abs() < 1e-2, "{:?}", t.best_params);
        assert!(t.iterations_used <= cfg.max_iterations);
    }

    #[test]
    fn single_iteration_evaluates_start_only() {
        let cfg = OptimizerConfig {
            max_iterations: 1,
            ..Default::default()
        };
        let t = minimize(bowl, &cfg, &[0.0, 0.0]).unwrap();
        assert_eq!(t.evaluations.len(), 1);
        assert_eq!(t.iterations_used, 1);
    }

    #[test]
    fn non_finite_marks_failure() {
        let cfg = OptimizerConfig::default();
        let t = minimize(|x: &[f64]| (if x[0] > 0.2 { f64::NAN } else { x[0] }, ()), &cfg, &[0.0]).unwrap();
        assert!(t.failed);
        assert_eq!(t.best_objective, 0.0);
    }

    #[test]
    fn invalid_config_rejected() {
        let bad = OptimizerConfig {
            restarts: 0,
            ..Default::default()
        };
        assert!(multi_start(bowl, 1, &bad, Parallelism::Sequential).is_err());
        let bad = OptimizerConfig {
            final_tolerance: 0.0,
            ..Default::default()
        };
        assert!(minimize(bowl, &bad, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn restart_starts_in_box_and_distinct() {
        let a = restart_start(7, 3, 0);
        let b = restart_start(7, 3, 1);
        assert_ne!(a, b);
        assert_eq!(a, restart_start(7, 3, 0));
        for x in [&a, &b] {
            assert!(x[..3].iter().all(|g| (0.0..2.0 * PI).contains(g)));
            assert!(x[3..].iter().all(|b| (0.0..PI).contains(b)));
        }
    }

    #[test]
    fn multi_start_matches_minimize() {
        let cfg = OptimizerConfig {
            restarts: 3,
            seed: 11,
            ..Default::default()
        };
        let runs = multi_start(bowl, 1, &cfg, Parallelism::default()).unwrap();
        let seq = multi_start(bowl, 1, &cfg, Parallelism::Sequential).unwrap();
        assert_eq!(runs, seq);
        for (r, t) in runs.iter().enumerate() {
            let direct = minimize(bowl, &cfg, &restart_start(11, 1, r)).unwrap();
            assert_eq!(*t, direct);
        }
    }
}
