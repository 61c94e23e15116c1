use crate::feasibility::{random_feasibility_pass, FeasibilityConfig, SampleRule};
use crate::metrics::{
    dykstra_projection, estimate_modified_dual_gap, sample_feasible_points, Halfspace,
};
use crate::numkit::{random_sym_with_spectrum, BoxSet, Matrix, RealVec, SeededStream};
use crate::problem::{
    AffineMap, ConstraintFamily, GameParams, MappingOracle, ProblemSpec, QuadraticConstraint,
};
use crate::solvers::{run_solver, AveragingMode, Method, SolverConfig, StepSchedule};
use crate::Result;

use super::checks::{
    check_feasibility_decay, check_polyak_step, check_theorem42, sequence_bound_margins,
};
use super::oracles::{brute_force_projection_grid, finite_diff_subgrad_check};
use super::{CheckReport, WitnessedProblem};

/// Sizes for the standard verification suite.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOptions {
    pub master_seed: u64,
    pub game_runs: usize,
    pub game_horizon: usize,
    pub polyak_cases: usize,
    pub decay_seeds: u64,
    pub oracle_instances: usize,
    pub gap_candidates: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            master_seed: 2024,
            game_runs: 50,
            game_horizon: 500,
            polyak_cases: 10_000,
            decay_seeds: 200,
            oracle_instances: 20,
            gap_candidates: 10_000,
        }
    }
}

fn report(name: &str, r: Result<CheckReport>) -> CheckReport {
    r.unwrap_or_else(|e| CheckReport::errored(name, e))
}

pub fn run_verify_suite(opts: &SuiteOptions) -> Vec<CheckReport> {
    let s = opts.master_seed;
    vec![
        theorem42_on_games(opts.game_runs, opts.game_horizon, s),
        polyak_inequality_cases(opts.polyak_cases, s),
        decay_on_halfspace(opts.decay_seeds, s),
        oracle_equivalence(opts.oracle_instances, s),
        evaluation_counts(200, s),
        sequence_bound_grid(),
        gap_at_solution(opts.gap_candidates, s),
        subgradient_differences(200, s),
        grid_projection_agreement(s),
    ]
}

/// Per-iterate feasibility inequality on randomly generated bilinear games,
/// alternating methods and drawing `β ∈ [0.25, 1.75]` per run.
pub fn theorem42_on_games(runs: usize, horizon: usize, master_seed: u64) -> CheckReport {
    const NAME: &str = "per_iterate_feasibility_inequality";
    report(
        NAME,
        (|| {
            let mut worst = f64::NEG_INFINITY;
            for r in 0..runs {
                let mut rng = SeededStream::new(master_seed, 100 + r as u64);
                let game = GameParams::default().generate::<f64>(&mut rng)?;
                let wp = WitnessedProblem::new(game.spec.clone(), 1_000_000, &mut rng.fork(7))?;
                let beta = rng.uniform(0.25, 1.75);
                let cfg = SolverConfig {
                    method: if r % 2 == 0 {
                        Method::Korpelevich
                    } else {
                        Method::Popov
                    },
                    steps: StepSchedule::parameter_free(0.3)?,
                    averaging: AveragingMode::InvAlpha,
                    feas: FeasibilityConfig::new(beta, SampleRule::Root(2.0))?,
                    horizon,
                    master_seed: rng.next_u64(),
                };
                let trace = run_solver(&game.spec, &cfg)?;
                let c = check_theorem42(&trace, &wp, beta, game.spec.family().subgrad_bound())?;
                worst = worst.max(c.worst_rel);
            }
            Ok(CheckReport::new(
                NAME,
                worst <= 1e-10,
                worst,
                1e-10,
                format!("{runs} runs, T = {horizon}"),
            ))
        })(),
    )
}

/// Single Polyak steps on random convex quadratics (a quarter of them
/// affine) in dimensions 1 to 4.
pub fn polyak_inequality_cases(cases: usize, master_seed: u64) -> CheckReport {
    const NAME: &str = "polyak_step_inequality";
    report(
        NAME,
        (|| {
            let mut rng = SeededStream::new(master_seed, 200);
            let mut worst = f64::NEG_INFINITY;
            let mut violations = 0usize;
            for i in 0..cases {
                let n = 1 + rng.index(4);
                let base = BoxSet::symmetric(n, rng.uniform(0.5, 2.0))?;
                let b = if i % 4 == 0 {
                    Matrix::zeros(n, n)
                } else {
                    let eigs: Vec<f64> = (0..n).map(|_| rng.uniform(0.0, 3.0)).collect();
                    random_sym_with_spectrum(&eigs, &mut rng)?
                };
                let c = RealVec::from_fn(n, |_| rng.uniform(-5.0, 5.0));
                let w = base.sample_uniform(&mut rng);
                let g_at_w = QuadraticConstraint::new(b.clone(), c.clone(), 0.0)?.value(&w)?;
                let g = QuadraticConstraint::new(b, c, g_at_w + rng.uniform(0.0, 1.0))?;
                let z = base.sample_uniform(&mut rng);
                let beta = rng.uniform(1e-3, 2.0 - 1e-3);
                let rel = check_polyak_step(&g, &z, beta, &w, &base)?;
                if rel > 1e-12 {
                    violations += 1;
                }
                worst = worst.max(rel);
            }
            Ok(CheckReport::new(
                NAME,
                violations == 0,
                worst,
                1e-12,
                format!("{cases} cases, {violations} violations"),
            ))
        })(),
    )
}

/// The box `[-1,1]²` cut by `x₁ + x₂ <= 1/2`.
pub fn halfspace_problem(master_seed: u64) -> Result<WitnessedProblem<f64>> {
    WitnessedProblem::from_halfspaces(
        BoxSet::symmetric(2, 1.0)?,
        vec![Halfspace::new(RealVec::from_f64(&[1.0, 1.0])?, 0.5)?],
        10_000,
        &mut SeededStream::new(master_seed, 300),
    )
}

/// Geometric infeasibility decay with `β = 0.5`, `N = 1..30`.
pub fn decay_on_halfspace(seeds: u64, master_seed: u64) -> CheckReport {
    const NAME: &str = "feasibility_decay";
    report(
        NAME,
        (|| {
            let wp = halfspace_problem(master_seed)?;
            let ns: Vec<u64> = (1..=30).collect();
            let d = check_feasibility_decay(&wp, 0.5, &ns, seeds, master_seed)?;
            Ok(CheckReport::new(
                NAME,
                d.slope < 0.0 && d.r_squared >= 0.9,
                d.slope,
                0.0,
                format!("r_squared = {:e}, floored = {}", d.r_squared, d.floored),
            ))
        })(),
    )
}

/// A 500-step pass with `β = 1` against Dykstra's projection on random
/// box-and-halfspace instances, started inside the box.
pub fn oracle_equivalence(instances: usize, master_seed: u64) -> CheckReport {
    const NAME: &str = "pass_matches_exact_projection";
    report(
        NAME,
        (|| {
            let mut rng = SeededStream::new(master_seed, 400);
            let base = BoxSet::symmetric(2, 1.0)?;
            let mut worst = 0.0f64;
            for _ in 0..instances {
                let theta = rng.uniform(0.0, std::f64::consts::TAU);
                let h = Halfspace::new(
                    RealVec::from_f64(&[theta.cos(), theta.sin()])?,
                    rng.uniform(-0.5, 0.5),
                )?;
                let fam = ConstraintFamily::finite(
                    vec![QuadraticConstraint::affine(h.normal.clone(), h.offset)?],
                    &base,
                )?;
                let start = base.sample_uniform(&mut rng);
                let pass = random_feasibility_pass(&start, 500, &fam, 1.0, &base, &mut rng)?;
                let exact = dykstra_projection(&start, &base, &[h], 20_000)?;
                worst = worst.max(pass.point.max_abs_diff(&exact));
            }
            Ok(CheckReport::new(
                NAME,
                worst <= 1e-3,
                worst,
                1e-3,
                format!("{instances} instances"),
            ))
        })(),
    )
}

/// `2T` fresh evaluations for Korpelevich and `T + 1` for Popov.
pub fn evaluation_counts(horizon: usize, master_seed: u64) -> CheckReport {
    const NAME: &str = "evaluation_counts";
    report(
        NAME,
        (|| {
            let mut rng = SeededStream::new(master_seed, 500);
            let game = GameParams {
                num_constraints: 20,
                ..GameParams::default()
            }
            .generate::<f64>(&mut rng)?;
            let mut mismatch = 0u64;
            for (method, expected) in [
                (Method::Korpelevich, 2 * horizon),
                (Method::Popov, horizon + 1),
            ] {
                let cfg = SolverConfig {
                    method,
                    steps: StepSchedule::parameter_free(0.3)?,
                    averaging: AveragingMode::InvAlpha,
                    feas: FeasibilityConfig::new(1.0, SampleRule::Root(2.0))?,
                    horizon,
                    master_seed,
                };
                let got = run_solver(&game.spec, &cfg)?.fresh_evals;
                mismatch += got.abs_diff(expected as u64);
            }
            Ok(CheckReport::new(
                NAME,
                mismatch == 0,
                mismatch as f64,
                0.0,
                format!("T = {horizon}"),
            ))
        })(),
    )
}

/// Step-sequence bounds for `ᾱ ∈ {0.1, 1, 10}`, `T ∈ {1, 2, 10, 100, 10⁴}`.
pub fn sequence_bound_grid() -> CheckReport {
    let mut worst = f64::INFINITY;
    for a in [0.1, 1.0, 10.0] {
        for t in [1, 2, 10, 100, 10_000] {
            let m = sequence_bound_margins(a, t);
            worst = worst.min(m.sum).min(m.sum_sq).min(m.sum_inv);
        }
    }
    CheckReport::new(
        "step_sequence_bounds",
        worst >= 0.0,
        worst,
        0.0,
        "smallest slack over the grid",
    )
}

/// Modified dual gap at the origin of a random bilinear game on `[-1,1]⁴`
/// cut by the ball `|x|² <= 2`.
pub fn gap_at_solution(candidates: usize, master_seed: u64) -> CheckReport {
    const NAME: &str = "gap_at_solution";
    report(
        NAME,
        (|| {
            let mut rng = SeededStream::new(master_seed, 600);
            let params = GameParams::default();
            let game = params.generate::<f64>(&mut rng)?;
            let base = BoxSet::symmetric(4, 1.0)?;
            let ball = QuadraticConstraint::new(Matrix::identity(4), RealVec::zeros(4), 2.0)?;
            let family = ConstraintFamily::finite(vec![ball], &base)?;
            let oracle = MappingOracle::affine(
                AffineMap::linear(skew_of(&game.payoff))?,
                params.noise_stddev,
            )?;
            let spec = ProblemSpec::new(oracle, base, family)?;
            let cloud = sample_feasible_points(&spec, candidates, &mut rng.fork(1))?;
            let g = estimate_modified_dual_gap(&RealVec::zeros(4), &cloud, &spec)?;
            Ok(CheckReport::new(
                NAME,
                g.value <= 0.01,
                g.value,
                0.01,
                format!(
                    "{} of {} candidates feasible",
                    g.num_feasible, g.num_samples
                ),
            ))
        })(),
    )
}

fn skew_of(a: &Matrix<f64>) -> Matrix<f64> {
    let n = a.rows();
    Matrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, false) => a.get(i, j - n),
        (false, true) => -a.get(j, i - n),
        _ => 0.0,
    })
}

/// Central differences against the returned gradient on violated random
/// quadratics.
pub fn subgradient_differences(cases: usize, master_seed: u64) -> CheckReport {
    const NAME: &str = "subgradient_finite_differences";
    report(
        NAME,
        (|| {
            let mut rng = SeededStream::new(master_seed, 700);
            let mut worst = 0.0f64;
            let mut checked = 0;
            while checked < cases {
                let eigs: Vec<f64> = (0..3).map(|_| rng.uniform(0.0, 2.0)).collect();
                let b = random_sym_with_spectrum(&eigs, &mut rng)?;
                let c = RealVec::from_fn(3, |_| rng.uniform(-10.0, -5.0));
                let g = QuadraticConstraint::new(b, c, rng.uniform(-1.0, 0.0))?;
                let x = BoxSet::symmetric(3, 1.0)?.sample_uniform(&mut rng);
                if g.value(&x)? <= 0.0 {
                    continue;
                }
                worst = worst.max(finite_diff_subgrad_check(&g, &x, 1e-5)?);
                checked += 1;
            }
            Ok(CheckReport::new(
                NAME,
                worst <= 1e-6,
                worst,
                1e-6,
                format!("{cases} violated points"),
            ))
        })(),
    )
}

/// Distance to `S` from Dykstra's projection against a brute-force grid
/// search in 2D.
pub fn grid_projection_agreement(master_seed: u64) -> CheckReport {
    const NAME: &str = "projection_vs_grid";
    report(
        NAME,
        (|| {
            let wp = halfspace_problem(master_seed)?;
            let mut rng = SeededStream::new(master_seed, 800);
            let pitch = 0.01;
            let mut worst = 0.0f64;
            for _ in 0..10 {
                let x = RealVec::from_fn(2, |_| rng.uniform(-1.5, 1.5));
                let grid = brute_force_projection_grid(&x, &wp, pitch)?;
                worst = worst.max((grid.dist(&x) - wp.distance(&x)?).abs());
            }
            let bound = pitch * 2f64.sqrt();
            Ok(CheckReport::new(
                NAME,
                worst <= bound,
                worst,
                bound,
                "10 points, pitch 0.01",
            ))
        })(),
    )
}
