use crate::feasibility::{polyak_step, random_feasibility_pass};
use crate::metrics::fit_line;
use crate::numkit::{BoxSet, RealVec, SeededStream};
use crate::problem::QuadraticConstraint;
use crate::solvers::SolverTrace;
use crate::{Error, Result, Scalar};

use super::WitnessedProblem;

/// Largest excess of `|x_k − x̄|²` over
/// `|v_k − x̄|² − β(2 − β)/M_g² Σ (g⁺)²` along a trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoremCheck<T> {
    pub worst_abs: T,
    /// excess divided by `1 + |v_k − x̄|²`
    pub worst_rel: T,
    pub worst_iter: usize,
}

pub fn check_theorem42<T: Scalar>(
    trace: &SolverTrace<T>,
    wp: &WitnessedProblem<T>,
    beta: T,
    mg: T,
) -> Result<TheoremCheck<T>> {
    let excess = theorem42_excess(trace, wp, beta, mg)?;
    let w = wp.witness();
    let mut out = TheoremCheck {
        worst_abs: T::neg_infinity(),
        worst_rel: T::neg_infinity(),
        worst_iter: 0,
    };
    for (rec, &e) in trace.records.iter().zip(&excess) {
        let rel = e / (T::one() + rec.v.dist_sq(w));
        if rel > out.worst_rel {
            out = TheoremCheck {
                worst_abs: e,
                worst_rel: rel,
                worst_iter: rec.k,
            };
        }
    }
    Ok(out)
}

/// Per-iteration `LHS − RHS` of the feasibility inequality at the witness.
pub fn theorem42_excess<T: Scalar>(
    trace: &SolverTrace<T>,
    wp: &WitnessedProblem<T>,
    beta: T,
    mg: T,
) -> Result<Vec<T>> {
    if !(mg > T::zero()) {
        return Err(Error::InvalidInput(
            "subgradient bound must be positive".into(),
        ));
    }
    if trace.records.is_empty() {
        return Err(Error::InvalidInput("empty trace".into()));
    }
    let coef = beta * (T::of(2.0) - beta) / (mg * mg);
    let w = wp.witness();
    trace
        .records
        .iter()
        .map(|rec| {
            if rec.sq_residuals.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "iteration {} carries no feasibility residuals",
                    rec.k
                )));
            }
            let rhs = rec.v.dist_sq(w) - coef * rec.residual_sum();
            Ok(rec.x.dist_sq(w) - rhs)
        })
        .collect()
}

/// Relative excess of one Polyak step over
/// `|z − x̄|² − β(2 − β)(g⁺)²/|d|²`. `x̄` must lie in `Y` and satisfy `g`.
pub fn check_polyak_step<T: Scalar>(
    constraint: &QuadraticConstraint<T>,
    z: &RealVec<T>,
    beta: T,
    witness: &RealVec<T>,
    base: &BoxSet<T>,
) -> Result<T> {
    if constraint.value(witness)? > T::zero() || !base.contains(witness) {
        return Err(Error::InvalidInput("witness must be feasible".into()));
    }
    let (gplus, d) = constraint.plus_subgradient(z)?;
    let next = polyak_step(z, gplus, &d, beta, base)?;
    let before = z.dist_sq(witness);
    let decrease = if gplus > T::zero() {
        beta * (T::of(2.0) - beta) * gplus * gplus / d.norm_sq()
    } else {
        T::zero()
    };
    Ok((next.dist_sq(witness) - (before - decrease)) / (T::one() + before))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayCheck<T> {
    pub slope: T,
    pub r_squared: T,
    pub mean_dist: Vec<T>,
    pub floored: usize,
}

/// Log-linear fit of the seed-mean of `dist(x_N, S)` against `N`, where
/// `x_N` ends an `N`-step pass started at a uniform point of `Y`. Seed `s`
/// uses the same start and constraint draws for every `N`. Means
/// below `T::epsilon()` are floored there before taking logs.
pub fn check_feasibility_decay<T: Scalar>(
    wp: &WitnessedProblem<T>,
    beta: T,
    ns: &[u64],
    seeds: u64,
    master_seed: u64,
) -> Result<DecayCheck<T>> {
    if !wp.has_exact_projection() {
        return Err(Error::Unsupported(
            "decay check needs an exact projection".into(),
        ));
    }
    if seeds == 0 || ns.len() < 2 {
        return Err(Error::InvalidInput(
            "decay check needs seeds and two or more N".into(),
        ));
    }
    let spec = wp.spec();
    let mut mean_dist = Vec::with_capacity(ns.len());
    for &n in ns {
        let mut total = T::zero();
        for s in 0..seeds {
            let mut rng = SeededStream::new(master_seed, s);
            let start = spec.base_set().sample_uniform(&mut rng);
            let pass =
                random_feasibility_pass(&start, n, spec.family(), beta, spec.base_set(), &mut rng)?;
            total = total + wp.distance(&pass.point)?;
        }
        mean_dist.push(total / T::of(seeds as f64));
    }
    let floor = T::epsilon();
    let floored = mean_dist.iter().filter(|&&d| d < floor).count();
    let xs: Vec<T> = ns.iter().map(|&n| T::of(n as f64)).collect();
    let ys: Vec<T> = mean_dist.iter().map(|&d| d.max(floor).ln()).collect();
    let fit = fit_line(&xs, &ys)?;
    Ok(DecayCheck {
        slope: fit.slope,
        r_squared: fit.r_squared,
        mean_dist,
        floored,
    })
}

/// Slack in the three step-sequence bounds for `α_k = ᾱ/√(k+1)`,
/// `k = 1..T`. Every field is `lhs − rhs` oriented so that `>= 0` holds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SequenceMargins {
    pub horizon: usize,
    pub sum: f64,
    pub sum_sq: f64,
    pub sum_inv: f64,
}

impl SequenceMargins {
    pub fn holds(&self) -> bool {
        self.sum >= 0.0 && self.sum_sq >= 0.0 && self.sum_inv >= 0.0
    }
}

pub fn sequence_bound_margins(alpha_bar: f64, horizon: usize) -> SequenceMargins {
    let (mut s, mut s2, mut sinv) = (0.0, 0.0, 0.0);
    for k in 1..=horizon {
        let a = alpha_bar / ((k + 1) as f64).sqrt();
        s += a;
        s2 += a * a;
        sinv += 1.0 / a;
    }
    let t = horizon as f64;
    let inv_const = 1.5f64.sqrt() - 2.0 / 3.0;
    SequenceMargins {
        horizon,
        sum: s - alpha_bar * t.sqrt() / 2f64.sqrt(),
        sum_sq: alpha_bar * alpha_bar * (t + 2.0).ln() - s2,
        sum_inv: sinv - inv_const * t.powf(1.5) / alpha_bar,
    }
}

/// True when all three bounds hold at every horizon in `ts`.
pub fn check_sequence_bounds(alpha_bar: f64, ts: &[usize]) -> bool {
    alpha_bar > 0.0
        && ts
            .iter()
            .all(|&t| sequence_bound_margins(alpha_bar, t).holds())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::{FeasibilityConfig, SampleRule};
    use crate::metrics::Halfspace;
    use crate::numkit::Matrix;
    use crate::problem::{AffineMap, ConstraintFamily, GameParams, MappingOracle, ProblemSpec};
    use crate::solvers::{run_solver, AveragingMode, Method, SolverConfig, StepSchedule};

    fn v(x: &[f64]) -> RealVec<f64> {
        RealVec::from_f64(x).unwrap()
    }

    fn cfg(method: Method, horizon: usize, seed: u64, beta: f64) -> SolverConfig<f64> {
        SolverConfig {
            method,
            steps: StepSchedule::parameter_free(0.3).unwrap(),
            averaging: AveragingMode::InvAlpha,
            feas: FeasibilityConfig::new(beta, SampleRule::Root(2.0)).unwrap(),
            horizon,
            master_seed: seed,
        }
    }

    #[test]
    fn sequence_bounds_boundary_case() {
        let m = sequence_bound_margins(1.0, 1);
        assert_eq!(m.sum, 0.0);
        assert!((m.sum_sq - (3f64.ln() - 0.5)).abs() < 1e-15);
        assert!(check_sequence_bounds(1.0, &[1]));
    }

    #[test]
    fn sequence_bounds_large_and_small() {
        assert!(check_sequence_bounds(10.0, &[10_000]));
        let m = sequence_bound_margins(0.1, 2);
        let direct = (2f64.sqrt() + 3f64.sqrt()) / 0.1;
        let rhs = 10.0 * (1.5f64.sqrt() - 2.0 / 3.0) * 2f64.powf(1.5);
        assert!((m.sum_inv - (direct - rhs)).abs() < 1e-12);
        assert!(m.holds());
        assert!(!check_sequence_bounds(0.0, &[1]));
    }

    #[test]
    fn feasible_start_has_no_excess() {
        // constraints slack everywhere on the box: residuals are all zero
        let base = BoxSet::symmetric(2, 1.0).unwrap();
        let fam = ConstraintFamily::finite(
            vec![QuadraticConstraint::affine(v(&[1.0, 1.0]), 5.0).unwrap()],
            &base,
        )
        .unwrap();
        let oracle = MappingOracle::affine(
            AffineMap::linear(Matrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap())
                .unwrap(),
            1.0,
        )
        .unwrap();
        let spec = ProblemSpec::new(oracle, base, fam).unwrap();
        let mg = spec.family().subgrad_bound();
        let wp = WitnessedProblem::new(spec.clone(), 100, &mut SeededStream::new(0, 0)).unwrap();
        let tr = run_solver(&spec, &cfg(Method::Korpelevich, 50, 1, 1.0)).unwrap();
        let c = check_theorem42(&tr, &wp, 1.0, mg).unwrap();
        assert!(c.worst_abs.abs() <= 1e-12);
    }

    #[test]
    fn game_runs_satisfy_inequality_and_corruption_is_caught() {
        let mut rng = SeededStream::new(21, 0);
        let game = GameParams::default().generate::<f64>(&mut rng).unwrap();
        let wp = WitnessedProblem::new(game.spec.clone(), 100_000, &mut rng.fork(3)).unwrap();
        let mg = game.spec.family().subgrad_bound();
        for method in [Method::Korpelevich, Method::Popov] {
            let mut tr = run_solver(&game.spec, &cfg(method, 500, 5, 1.0)).unwrap();
            let c = check_theorem42(&tr, &wp, 1.0, mg).unwrap();
            assert!(c.worst_rel <= 1e-10, "{c:?}");
            let clean = theorem42_excess(&tr, &wp, 1.0, mg).unwrap();
            tr.records[100].sq_residuals[0] += 1.0;
            let dirty = theorem42_excess(&tr, &wp, 1.0, mg).unwrap();
            let expect = 1.0 / (mg * mg);
            assert!((dirty[100] - clean[100] - expect).abs() <= expect * 1e-9);
            assert_eq!(dirty[99], clean[99]);
        }
    }

    #[test]
    fn missing_residuals_rejected() {
        let mut rng = SeededStream::new(2, 0);
        let game = GameParams::default().generate::<f64>(&mut rng).unwrap();
        let wp = WitnessedProblem::new(game.spec.clone(), 100_000, &mut rng).unwrap();
        let mut tr = run_solver(&game.spec, &cfg(Method::Popov, 5, 1, 1.0)).unwrap();
        tr.records[2].sq_residuals.clear();
        assert!(check_theorem42(&tr, &wp, 1.0, 1.0).is_err());
    }

    #[test]
    fn polyak_step_inequality_on_random_quadratics() {
        let mut rng = SeededStream::new(8, 0);
        let base = BoxSet::symmetric(3, 1.0).unwrap();
        for _ in 0..500 {
            let eigs: Vec<f64> = (0..3).map(|_| rng.uniform(0.0, 2.0)).collect();
            let b = crate::numkit::random_sym_with_spectrum::<f64>(&eigs, &mut rng).unwrap();
            let c = RealVec::from_fn(3, |_| rng.uniform(-3.0, 3.0));
            let w = base.sample_uniform(&mut rng);
            let g0 = QuadraticConstraint::new(b.clone(), c.clone(), 0.0)
                .unwrap()
                .value(&w)
                .unwrap();
            let g = QuadraticConstraint::new(b, c, g0 + rng.uniform(0.0, 0.5)).unwrap();
            let z = base.sample_uniform(&mut rng);
            let beta = rng.uniform(0.05, 1.95);
            assert!(check_polyak_step(&g, &z, beta, &w, &base).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn exact_projection_floors_at_epsilon() {
        let wp = WitnessedProblem::from_halfspaces(
            BoxSet::symmetric(2, 1.0).unwrap(),
            vec![Halfspace::new(v(&[1.0, 1.0]), 0.5).unwrap()],
            1000,
            &mut SeededStream::new(0, 0),
        )
        .unwrap();
        let d = check_feasibility_decay(&wp, 1.0, &[1, 2, 3], 50, 7).unwrap();
        assert!(d.mean_dist.iter().all(|&m| m < 1e-12));
        assert_eq!(d.floored, 3);
    }

    #[test]
    fn decay_slope_negative_and_fastest_near_one() {
        let wp = WitnessedProblem::from_halfspaces(
            BoxSet::symmetric(2, 1.0).unwrap(),
            vec![Halfspace::new(v(&[1.0, 1.0]), 0.5).unwrap()],
            1000,
            &mut SeededStream::new(0, 0),
        )
        .unwrap();
        let ns: Vec<u64> = (1..=30).collect();
        let half = check_feasibility_decay(&wp, 0.5, &ns, 200, 7).unwrap();
        assert!(half.slope < 0.0 && half.r_squared >= 0.9, "{half:?}");
        assert!((half.slope - 0.5f64.ln()).abs() < 1e-6);
        // over-relaxed steps land strictly inside a halfspace, so compare
        // the means directly rather than slopes of mostly floored data
        for beta in [0.9, 1.5] {
            let other = check_feasibility_decay(&wp, beta, &ns, 200, 7).unwrap();
            for (a, b) in other.mean_dist.iter().zip(&half.mean_dist) {
                assert!(a <= b);
            }
        }
    }
}
