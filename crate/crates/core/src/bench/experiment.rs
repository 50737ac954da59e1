//! Experiment orchestration and per-restart metrics.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::instance::{generate_instance, SizeParams};
use super::report::{mean_std, BenchmarkRow, OutputFormat, RowStatus};
use crate::encode::{encode_qubo, encode_qudo, Encoding, PenaltyWeights, ProblemInstance, ProblemKind};
use crate::error::{Error, Result};
use crate::model::MemoryBudget;
use crate::optim::{minimize, restart_start, OptimizerConfig, RunTrace};
use crate::oracle::{approximation_ratio, brute_force_optimum, feasible_states, ExactResult};
use crate::par::Parallelism;
use crate::sim::{run_circuit_with, QaoaParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingChoice {
    Qubo,
    Qudo,
    #[default]
    Both,
}

impl EncodingChoice {
    pub fn encodings(self) -> Vec<Encoding> {
        match self {
            EncodingChoice::Qubo => vec![Encoding::Qubo],
            EncodingChoice::Qudo => vec![Encoding::Qudo],
            EncodingChoice::Both => vec![Encoding::Qubo, Encoding::Qudo],
        }
    }
}

/// Explicit penalty weights; unset ones fall back to the defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PenaltyOverrides {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
}

impl PenaltyOverrides {
    pub fn resolve(&self, inst: &ProblemInstance) -> PenaltyWeights {
        let d = PenaltyWeights::default_for(inst);
        PenaltyWeights::new(self.a.unwrap_or(d.a), self.b.unwrap_or(d.b), self.c.unwrap_or(d.c))
    }
}

/// Everything needed to reproduce one results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    #[serde(flatten)]
    pub sizes: SizeParams,
    pub encoding: EncodingChoice,
    pub depths: Vec<usize>,
    pub optimizer: OptimizerConfig,
    pub penalties: PenaltyOverrides,
    pub instance_seed: u64,
    /// Explicit instance; replaces generation from `sizes` and `instance_seed`.
    pub instance: Option<ProblemInstance>,
    pub format: OutputFormat,
    /// Worker cap for restart-level parallelism.
    pub workers: Option<usize>,
    /// Largest register, in basis states, that is simulated.
    pub memory_budget: usize,
    /// Start point shared by every restart instead of random draws.
    pub start: Option<Vec<f64>>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: ProblemKind::Tsp,
            sizes: SizeParams::new(3),
            encoding: EncodingChoice::default(),
            depths: vec![1, 2, 3],
            optimizer: OptimizerConfig::default(),
            penalties: PenaltyOverrides::default(),
            instance_seed: 0,
            instance: None,
            format: OutputFormat::default(),
            workers: None,
            memory_budget: crate::model::DEFAULT_BUDGET,
            start: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.depths.is_empty() || self.depths.contains(&0) {
            return Err(Error::invalid("depths must be a non-empty list of p ≥ 1"));
        }
        self.optimizer.validate()?;
        if let Some(start) = &self.start {
            if self.depths.iter().any(|&p| start.len() != 2 * p) {
                return Err(Error::invalid("fixed start needs 2p entries for every depth"));
            }
        }
        if self.workers == Some(0) {
            return Err(Error::invalid("workers must be at least 1"));
        }
        Ok(())
    }

    /// The instance this configuration runs on.
    pub fn resolve_instance(&self) -> Result<ProblemInstance> {
        match &self.instance {
            Some(inst) => {
                inst.validate()?;
                Ok(inst.clone())
            }
            None => generate_instance(self.problem, &self.sizes, self.instance_seed),
        }
    }
}

/// Most probable feasible basis state at one evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSnapshot {
    pub index: usize,
    pub probability: f64,
    pub objective: f64,
}

/// Encoded problem ready for simulation.
#[derive(Debug, Clone)]
pub struct PreparedProblem {
    pub instance: ProblemInstance,
    pub encoding: Encoding,
    pub exact: ExactResult,
    pub num_sites: usize,
    pub local_dim: usize,
    pub diagonal: Vec<f64>,
    /// Spread `max − min` of the encoded energies (1 if flat). `diagonal`
    /// holds the energies divided by it, so `γ` acts on a unit-range
    /// spectrum whatever the penalty weights.
    pub phase_scale: f64,
    /// Feasible basis indices (ascending) with their penalty-free objective.
    pub feasible: Vec<(usize, f64)>,
}

impl PreparedProblem {
    pub fn new(
        instance: &ProblemInstance,
        encoding: Encoding,
        weights: &PenaltyWeights,
        exact: ExactResult,
        budget: MemoryBudget,
        par: Parallelism,
    ) -> Result<Self> {
        weights.validate_for(instance, encoding)?;
        let (num_sites, local_dim) = instance.register_shape(encoding);
        budget.check(num_sites, local_dim, "register")?;
        let diagonal = match encoding {
            Encoding::Qudo => encode_qudo(instance, weights)?.build_diagonal_with(budget, par)?,
            Encoding::Qubo => encode_qubo(instance, weights)?.build_diagonal_with(budget, par)?,
        };
        let feasible = feasible_states(instance, encoding, budget)?
            .into_iter()
            .map(|(z, a)| (z, crate::encode::native_objective(instance, a.values())))
            .collect();
        let (lo, hi) = diagonal
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| (lo.min(e), hi.max(e)));
        let phase_scale = hi - lo;
        let phase_scale = if phase_scale > 0.0 { phase_scale } else { 1.0 };
        Ok(Self {
            instance: instance.clone(),
            encoding,
            exact,
            num_sites,
            local_dim,
            diagonal: diagonal.iter().map(|e| e / phase_scale).collect(),
            phase_scale,
            feasible,
        })
    }

    /// Expectation and mode snapshot at `flat` (`[γ.., β..]`).
    pub fn evaluate(&self, flat: &[f64], par: Parallelism) -> Result<(f64, Option<ModeSnapshot>, f64)> {
        let params = QaoaParams::from_flat(flat)?;
        let state = run_circuit_with(
            self.num_sites,
            self.local_dim,
            &self.diagonal,
            &params,
            MemoryBudget(self.diagonal.len()),
            par,
        )?;
        let energy = state.expectation_with(&self.diagonal, par)?;
        let amps = state.amplitudes();
        let mut mode: Option<ModeSnapshot> = None;
        let mut p_valid = 0.0;
        for &(z, objective) in &self.feasible {
            let prob = amps[z].norm_sqr();
            p_valid += prob;
            if mode.is_none_or(|m| prob > m.probability) {
                mode = Some(ModeSnapshot {
                    index: z,
                    probability: prob,
                    objective,
                });
            }
        }
        Ok((energy, mode, p_valid))
    }

    pub fn uniform_feasible_fraction(&self) -> f64 {
        self.feasible.len() as f64 / self.diagonal.len() as f64
    }
}

/// Metrics of one restart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartOutcome {
    /// Best objective among the mode snapshots of all evaluations.
    pub best_feasible: Option<f64>,
    pub ar: Option<f64>,
    pub reached: bool,
    pub steps_to_target: Option<usize>,
    pub evals_to_target: Option<usize>,
    /// Feasible probability mass of the state at the best parameters.
    pub p_valid: f64,
    pub seconds: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub failed: bool,
    pub best_energy: f64,
}

fn outcome(prep: &PreparedProblem, trace: &RunTrace<Option<ModeSnapshot>>, p_valid: f64, seconds: f64) -> RestartOutcome {
    let sense = prep.exact.sense;
    let mut best: Option<f64> = None;
    let mut target: Option<(usize, usize)> = None;
    for (i, e) in trace.evaluations.iter().enumerate() {
        if let Some(m) = e.snapshot {
            if best.is_none_or(|b| sense.better(m.objective, b)) {
                best = Some(m.objective);
            }
            if target.is_none() && prep.exact.is_optimal(m.objective) {
                target = Some((e.iteration, i + 1));
            }
        }
    }
    let reached = best.is_some_and(|b| prep.exact.is_optimal(b));
    RestartOutcome {
        best_feasible: best,
        ar: best.and_then(|b| {
            if reached {
                Some(1.0)
            } else {
                approximation_ratio(b, &prep.exact)
            }
        }),
        reached,
        steps_to_target: target.map(|t| t.0),
        evals_to_target: target.map(|t| t.1),
        p_valid,
        seconds,
        iterations: trace.iterations_used,
        evaluations: trace.evaluations.len(),
        failed: trace.failed,
        best_energy: trace.best_objective * prep.phase_scale,
    }
}

/// Runs every restart at depth `depth`. `start` overrides the random starts.
pub fn run_restarts(
    prep: &PreparedProblem,
    depth: usize,
    cfg: &OptimizerConfig,
    start: Option<&[f64]>,
    par: Parallelism,
) -> Result<Vec<RestartOutcome>> {
    cfg.validate()?;
    if depth == 0 {
        return Err(Error::invalid("depth must be at least 1"));
    }
    if start.is_some_and(|s| s.len() != 2 * depth) {
        return Err(Error::invalid("start needs 2p entries"));
    }
    // Kernels inside a restart stay sequential; restarts are the parallel unit.
    let inner = Parallelism::Sequential;
    par.map_range(cfg.restarts, |r| {
        let clock = Instant::now();
        let x0 = start.map_or_else(|| restart_start(cfg.seed, depth, r), <[f64]>::to_vec);
        let objective = |x: &[f64]| match prep.evaluate(x, inner) {
            Ok((energy, mode, _)) => (energy, mode),
            Err(_) => (f64::NAN, None),
        };
        let trace = minimize(objective, cfg, &x0)?;
        let (_, _, p_valid) = prep.evaluate(&trace.best_params, inner)?;
        Ok(outcome(prep, &trace, p_valid, clock.elapsed().as_secs_f64()))
    })
    .into_iter()
    .collect()
}

fn blank_row(inst: &ProblemInstance, encoding: Encoding, p: usize, status: RowStatus) -> BenchmarkRow {
    BenchmarkRow {
        p,
        n: inst.size(),
        k: inst.num_labels_k(),
        d: inst.num_depots(),
        v: inst.total_vehicles(),
        encoding,
        ar_mean: None,
        ar_std: None,
        reach_pct: None,
        steps_mean: None,
        steps_std: None,
        evals_mean: None,
        evals_std: None,
        pvalid_mean: None,
        pvalid_std: None,
        time_s_mean: None,
        time_s_std: None,
        best_cost: None,
        status,
    }
}

/// Aggregates restart outcomes into one table row.
pub fn aggregate(inst: &ProblemInstance, encoding: Encoding, p: usize, outcomes: &[RestartOutcome]) -> BenchmarkRow {
    let mut row = blank_row(inst, encoding, p, RowStatus::Ok);
    let pick = |f: &dyn Fn(&RestartOutcome) -> Option<f64>| -> Vec<f64> { outcomes.iter().filter_map(f).collect() };
    let split = |xs: Vec<f64>| mean_std(&xs).map_or((None, None), |(m, s)| (Some(m), Some(s)));
    (row.ar_mean, row.ar_std) = split(pick(&|o| o.ar));
    (row.steps_mean, row.steps_std) = split(pick(&|o| o.steps_to_target.map(|s| s as f64)));
    (row.evals_mean, row.evals_std) = split(pick(&|o| o.evals_to_target.map(|s| s as f64)));
    (row.pvalid_mean, row.pvalid_std) = split(pick(&|o| Some(o.p_valid)));
    (row.time_s_mean, row.time_s_std) = split(pick(&|o| Some(o.seconds)));
    if !outcomes.is_empty() {
        let hits = outcomes.iter().filter(|o| o.reached).count();
        row.reach_pct = Some(100.0 * hits as f64 / outcomes.len() as f64);
    }
    let sense = inst.sense();
    row.best_cost = outcomes
        .iter()
        .filter_map(|o| o.best_feasible)
        .reduce(|a, b| if sense.better(b, a) { b } else { a });
    row
}

/// Runs the configured experiment: one row per `(encoding, p)`.
///
/// Registers or oracles over budget produce [`RowStatus::SkippedResource`]
/// rows rather than an error.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<BenchmarkRow>> {
    cfg.validate()?;
    let inst = cfg.resolve_instance()?;
    let par = Parallelism::default();
    par.install(cfg.workers, || {
        let weights = cfg.penalties.resolve(&inst);
        let budget = MemoryBudget(cfg.memory_budget);
        let encodings = cfg.encoding.encodings();
        let exact = match brute_force_optimum(&inst) {
            Ok(e) => Some(e),
            Err(e) if e.is_resource_limit() => None,
            Err(e) => return Err(e),
        };
        let mut rows = Vec::new();
        for encoding in encodings {
            let prep = match &exact {
                None => None,
                Some(exact) => match PreparedProblem::new(&inst, encoding, &weights, exact.clone(), budget, par) {
                    Ok(p) => Some(p),
                    Err(e) if e.is_resource_limit() => None,
                    Err(e) => return Err(e),
                },
            };
            for &p in &cfg.depths {
                match &prep {
                    None => rows.push(blank_row(&inst, encoding, p, RowStatus::SkippedResource)),
                    Some(prep) => {
                        let outcomes = run_restarts(prep, p, &cfg.optimizer, cfg.start.as_deref(), par)?;
                        rows.push(aggregate(&inst, encoding, p, &outcomes));
                    }
                }
            }
        }
        Ok(rows)
    })
}
