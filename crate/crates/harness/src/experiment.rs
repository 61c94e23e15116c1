//! The run matrix: one solver run per (solver block, seed), evaluated at a
//! fixed cadence against a shared feasible point cloud.

use rayon::prelude::*;
use svi_core::metrics::{
    infeasibility_surrogate, sample_feasible_points, sample_product_feasible_points, GapEvaluator,
};
use svi_core::numkit::SeededStream;
use svi_core::solvers::{run_solver, AveragingMode, SolverTrace};
use svi_core::{Cloud, Family, Problem};

use crate::config::{CloudKind, ExperimentConfig, MethodName, SolverBlock};
use crate::error::{HarnessError, Result};

/// One evaluated checkpoint of a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Row {
    pub iter: usize,
    pub gap_alpha: f64,
    pub gap_invalpha: f64,
    pub gap_uniform: f64,
    pub infeas_p1: f64,
    pub infeas_p2: f64,
    pub fresh_evals: u64,
    pub wall_ns: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub block: String,
    pub method: MethodName,
    pub seed: u64,
    pub fingerprint: String,
    pub outcome: std::result::Result<Vec<Row>, String>,
}

impl RunRecord {
    pub fn rows(&self) -> Option<&[Row]> {
        self.outcome.as_deref().ok()
    }
}

/// The generated game with everything needed to score iterates.
pub struct PreparedProblem {
    pub spec: Problem,
    pub cloud: Cloud,
    pub evaluator: GapEvaluator<f64>,
    /// Constraints acting on each player's block.
    pub players: Vec<Family>,
}

// stream ids under the problem and cloud seeds
const STREAM_GAME: u64 = 0;
const STREAM_CLOUD: u64 = 0;

pub fn prepare_problem(cfg: &ExperimentConfig) -> Result<PreparedProblem> {
    let params = cfg.problem.game_params();
    let spec = params
        .generate::<f64>(&mut SeededStream::new(cfg.problem.seed, STREAM_GAME))?
        .spec;
    let ev = &cfg.evaluation;
    let mut rng = SeededStream::new(ev.cloud_seed, STREAM_CLOUD);
    let cloud = match ev.cloud {
        CloudKind::Product => sample_product_feasible_points(&spec, ev.cloud_candidates, &mut rng),
        CloudKind::Joint => sample_feasible_points(&spec, ev.cloud_candidates, &mut rng),
    }
    .map_err(|e| HarnessError::Run(format!("evaluation cloud: {e}")))?;
    let evaluator = GapEvaluator::new(&cloud, &spec)?;
    let players = spec
        .blocks()
        .iter()
        .map(|b| {
            spec.family()
                .restricted_to_block(b.clone(), spec.base_set())
        })
        .collect::<svi_core::Result<Vec<_>>>()?;
    Ok(PreparedProblem {
        spec,
        cloud,
        evaluator,
        players,
    })
}

/// Iterations at which a run is scored: multiples of `cadence`, plus `T`.
pub fn checkpoints(cadence: usize, horizon: usize) -> Vec<usize> {
    let mut ks: Vec<usize> = (1..=horizon / cadence).map(|i| i * cadence).collect();
    if ks.last() != Some(&horizon) {
        ks.push(horizon);
    }
    ks
}

/// Scores a finished trace at the configured cadence.
pub fn score_trace(
    prepared: &PreparedProblem,
    trace: &SolverTrace<f64>,
    averaging: AveragingMode,
    cadence: usize,
    record_wall_time: bool,
) -> Result<Vec<Row>> {
    let horizon = trace.records.len();
    checkpoints(cadence, horizon)
        .into_iter()
        .map(|k| {
            let r = &trace.records[k - 1];
            let gap = |m| prepared.evaluator.estimate(r.average(m)).value;
            let infeas = |p: usize| match prepared.players.get(p) {
                Some(f) => infeasibility_surrogate(r.average(averaging), f),
                None => Ok(0.0),
            };
            Ok(Row {
                iter: k,
                gap_alpha: gap(AveragingMode::Alpha),
                gap_invalpha: gap(AveragingMode::InvAlpha),
                gap_uniform: gap(AveragingMode::Uniform),
                infeas_p1: infeas(0)?,
                infeas_p2: infeas(1)?,
                // Popov's draw at x_0 is counted before the first iteration
                fresh_evals: r.fresh_evals,
                wall_ns: if record_wall_time { r.elapsed_ns } else { 0 },
            })
        })
        .collect()
}

pub fn run_single(
    prepared: &PreparedProblem,
    cfg: &ExperimentConfig,
    block: &SolverBlock,
    seed: u64,
) -> Result<Vec<Row>> {
    let lipschitz = prepared.spec.oracle().lipschitz();
    let solver = block.solver_config(&cfg.feasibility, lipschitz, seed)?;
    let trace = run_solver(&prepared.spec, &solver)?;
    score_trace(
        prepared,
        &trace,
        solver.averaging,
        cfg.evaluation.cadence,
        cfg.evaluation.record_wall_time,
    )
}

/// Runs every (solver block, seed) pair. Runs execute in parallel; records
/// come back in block-major, seed-minor order. A failed run is recorded and
/// the others continue.
pub fn run_experiment_matrix(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let prepared = prepare_problem(cfg)?;
    Ok(run_matrix_on(&prepared, cfg))
}

pub fn run_matrix_on(prepared: &PreparedProblem, cfg: &ExperimentConfig) -> Vec<RunRecord> {
    let fingerprint = cfg.fingerprint();
    let jobs: Vec<(&SolverBlock, u64)> = cfg
        .solvers
        .iter()
        .flat_map(|b| cfg.seeds.iter().map(move |&s| (b, s)))
        .collect();
    jobs.into_par_iter()
        .map(|(block, seed)| RunRecord {
            block: block.name.clone(),
            method: block.method,
            seed,
            fingerprint: fingerprint.clone(),
            outcome: run_single(prepared, cfg, block, seed).map_err(|e| e.to_string()),
        })
        .collect()
}
