use std::time::Instant;

use super::averaging::{Averages, AveragingMode, RunningAverage};
use super::schedule::StepSchedule;
use super::steps::{korpelevich_step, popov_step};
use crate::feasibility::{random_feasibility_pass, FeasibilityConfig};
use crate::numkit::{RealVec, SeededStream};
use crate::problem::ProblemSpec;
use crate::{Error, Result, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Korpelevich,
    Popov,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Korpelevich => "korpelevich",
            Method::Popov => "popov",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig<T> {
    pub method: Method,
    pub steps: StepSchedule<T>,
    /// Mode reported as "the" averaged iterate; all three are tracked.
    pub averaging: AveragingMode,
    pub feas: FeasibilityConfig<T>,
    pub horizon: usize,
    pub master_seed: u64,
}

impl<T: Scalar> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.horizon < 1 {
            return Err(Error::Config("horizon must be >= 1".into()));
        }
        self.steps.validate()?;
        self.feas.validate()
    }
}

// stream ids under the run's master seed
const STREAM_INIT: u64 = 1;
const STREAM_MAP: u64 = 2;
const STREAM_FEAS: u64 = 3;

/// Everything produced by outer iteration `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct IterRecord<T> {
    pub k: usize,
    pub alpha: T,
    pub n_k: u64,
    pub u: RealVec<T>,
    pub v: RealVec<T>,
    pub x: RealVec<T>,
    pub averages: Averages<T>,
    /// Cumulative fresh oracle calls after this iteration.
    pub fresh_evals: u64,
    /// Wall time since the run started, taken at the end of iteration `k`.
    pub elapsed_ns: u64,
    /// `(g⁺)²` at each step of this iteration's feasibility pass.
    pub sq_residuals: Vec<T>,
    /// `|ξ|²` of the fresh draws made in this iteration.
    pub noise_sq: Vec<T>,
}

impl<T: Scalar> IterRecord<T> {
    pub fn residual_sum(&self) -> T {
        self.sq_residuals.iter().copied().sum()
    }

    pub fn average(&self, mode: AveragingMode) -> &RealVec<T> {
        self.averages.get(mode)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverTrace<T> {
    pub method: Method,
    pub averaging: AveragingMode,
    pub x0: RealVec<T>,
    pub records: Vec<IterRecord<T>>,
    /// Includes Popov's initial evaluation at `u_0 = x_0`.
    pub fresh_evals: u64,
}

impl<T: Scalar> SolverTrace<T> {
    pub fn last(&self) -> &IterRecord<T> {
        self.records.last().expect("horizon >= 1")
    }

    /// The configured averaged iterate after the final iteration.
    pub fn final_average(&self) -> &RealVec<T> {
        self.last().average(self.averaging)
    }

    pub fn total_feasibility_steps(&self) -> u64 {
        self.records.iter().map(|r| r.n_k).sum()
    }
}

/// Runs `cfg.horizon` iterations from `x_0 ~ U(Y)`.
pub fn run_solver<T: Scalar>(
    spec: &ProblemSpec<T>,
    cfg: &SolverConfig<T>,
) -> Result<SolverTrace<T>> {
    cfg.validate()?;
    let started = Instant::now();
    let base = spec.base_set();
    let n = spec.dim();
    let mut init_rng = SeededStream::new(cfg.master_seed, STREAM_INIT);
    let mut map_rng = SeededStream::new(cfg.master_seed, STREAM_MAP);
    let mut feas_rng = SeededStream::new(cfg.master_seed, STREAM_FEAS);

    let x0 = base.sample_uniform(&mut init_rng);
    let mut x = x0.clone();
    let mut fresh_evals = 0u64;

    // Popov carries F̂(u_{k-1}); with u_0 = x_0 the first one is drawn here
    let mut fhat_prev = match cfg.method {
        Method::Popov => {
            fresh_evals += 1;
            Some(spec.map_sample(&x0, &mut map_rng).map_err(|e| at(0, e))?)
        }
        Method::Korpelevich => None,
    };

    let mut avg_alpha = RunningAverage::new(n);
    let mut avg_inv = RunningAverage::new(n);
    let mut avg_uniform = RunningAverage::new(n);
    let mut records = Vec::with_capacity(cfg.horizon);

    for k in 1..=cfg.horizon {
        let alpha = cfg.steps.at(k, cfg.horizon);
        let (u, v, noise_sq) = match cfg.method {
            Method::Korpelevich => {
                let s = korpelevich_step(&x, alpha, spec, &mut map_rng).map_err(|e| at(k, e))?;
                fresh_evals += 2;
                (s.u, s.v, s.noise_sq.to_vec())
            }
            Method::Popov => {
                let old = fhat_prev.as_ref().expect("Popov keeps its last evaluation");
                let s = popov_step(&x, old, alpha, spec, &mut map_rng).map_err(|e| at(k, e))?;
                fresh_evals += 1;
                fhat_prev = Some(s.fhat_new);
                (s.u, s.v, vec![s.noise_sq])
            }
        };
        let n_k = cfg.feas.schedule.count(k as u64).map_err(|e| at(k, e))?;
        let pass =
            random_feasibility_pass(&v, n_k, spec.family(), cfg.feas.beta, base, &mut feas_rng)
                .map_err(|e| at(k, e))?;
        x = pass.point;

        avg_alpha.push(&x, AveragingMode::Alpha.weight(alpha));
        avg_inv.push(&x, AveragingMode::InvAlpha.weight(alpha));
        avg_uniform.push(&x, AveragingMode::Uniform.weight(alpha));

        records.push(IterRecord {
            k,
            alpha,
            n_k,
            u,
            v,
            x: x.clone(),
            averages: Averages {
                by_alpha: avg_alpha.value().clone(),
                by_inv_alpha: avg_inv.value().clone(),
                uniform: avg_uniform.value().clone(),
            },
            fresh_evals,
            elapsed_ns: started.elapsed().as_nanos().min(u64::MAX as u128) as u64,
            sq_residuals: pass.sq_residuals,
            noise_sq,
        });
    }

    Ok(SolverTrace {
        method: cfg.method,
        averaging: cfg.averaging,
        x0,
        records,
        fresh_evals,
    })
}

fn at(iteration: usize, source: Error) -> Error {
    Error::Solver {
        iteration,
        source: Box::new(source),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::SampleRule;
    use crate::numkit::{BoxSet, Matrix};
    use crate::problem::{AffineMap, ConstraintFamily, MappingOracle, QuadraticConstraint};
    use crate::solvers::StepSchedule;

    fn v(x: &[f64]) -> RealVec<f64> {
        RealVec::from_f64(x).unwrap()
    }

    fn linear_problem(
        m: Matrix<f64>,
        noise: f64,
        family: ConstraintFamily<f64>,
    ) -> ProblemSpec<f64> {
        let n = m.rows();
        let oracle = MappingOracle::affine(AffineMap::linear(m).unwrap(), noise).unwrap();
        ProblemSpec::new(oracle, BoxSet::symmetric(n, 1.0).unwrap(), family).unwrap()
    }

    fn config(method: Method, horizon: usize, seed: u64) -> SolverConfig<f64> {
        SolverConfig {
            method,
            steps: StepSchedule::parameter_free(0.5).unwrap(),
            averaging: AveragingMode::InvAlpha,
            feas: FeasibilityConfig::new(1.0, SampleRule::Root(2.0)).unwrap(),
            horizon,
            master_seed: seed,
        }
    }

    #[test]
    fn korpelevich_zero_map_is_identity() {
        let p = linear_problem(Matrix::zeros(2, 2), 0.0, ConstraintFamily::empty());
        let x = v(&[0.3, -0.4]);
        let s = korpelevich_step(&x, 0.7, &p, &mut SeededStream::new(0, 0)).unwrap();
        assert_eq!(s.u, x);
        assert_eq!(s.v, x);
    }

    #[test]
    fn korpelevich_hand_evaluated() {
        // F(x) = x on [-1, 1]: u = 1 - 0.5 = 0.5, v = 1 - 0.5 * 0.5 = 0.75
        let p = linear_problem(Matrix::identity(1), 0.0, ConstraintFamily::empty());
        let s = korpelevich_step(&v(&[1.0]), 0.5, &p, &mut SeededStream::new(0, 0)).unwrap();
        assert_eq!(s.u, v(&[0.5]));
        assert_eq!(s.v, v(&[0.75]));
    }

    #[test]
    fn korpelevich_fixed_point_at_zero_of_map() {
        let p = linear_problem(Matrix::identity(2), 0.0, ConstraintFamily::empty());
        let s =
            korpelevich_step(&RealVec::zeros(2), 0.3, &p, &mut SeededStream::new(0, 0)).unwrap();
        assert_eq!(s.u, RealVec::zeros(2));
        assert_eq!(s.v, RealVec::zeros(2));
    }

    #[test]
    fn popov_examples() {
        let z = linear_problem(Matrix::zeros(1, 1), 0.0, ConstraintFamily::empty());
        let x = v(&[0.2]);
        let s = popov_step(
            &x,
            &RealVec::zeros(1),
            0.4,
            &z,
            &mut SeededStream::new(0, 0),
        )
        .unwrap();
        assert_eq!(
            (s.u.clone(), s.v.clone(), s.fhat_new.clone()),
            (x.clone(), x, RealVec::zeros(1))
        );

        let p = linear_problem(Matrix::identity(1), 0.0, ConstraintFamily::empty());
        let s = popov_step(
            &v(&[1.0]),
            &v(&[1.0]),
            0.5,
            &p,
            &mut SeededStream::new(0, 0),
        )
        .unwrap();
        assert_eq!(s.u, v(&[0.5]));
        assert_eq!(s.fhat_new, v(&[0.5]));
        assert_eq!(s.v, v(&[0.75]));
    }

    #[test]
    fn fresh_evaluation_counts() {
        let p = linear_problem(Matrix::identity(2), 0.5, ConstraintFamily::empty());
        let k = run_solver(&p, &config(Method::Korpelevich, 100, 1)).unwrap();
        assert_eq!(k.fresh_evals, 200);
        let q = run_solver(&p, &config(Method::Popov, 100, 1)).unwrap();
        assert_eq!(q.fresh_evals, 101);
        for (i, r) in q.records.iter().enumerate() {
            assert_eq!(r.fresh_evals, i as u64 + 2);
            assert_eq!(r.noise_sq.len(), 1);
        }
    }

    #[test]
    fn traces_are_deterministic() {
        let base = BoxSet::symmetric(2, 1.0).unwrap();
        let fam = ConstraintFamily::finite(
            vec![QuadraticConstraint::affine(v(&[1.0, 1.0]), 0.5).unwrap()],
            &base,
        )
        .unwrap();
        let p = linear_problem(
            Matrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap(),
            0.5,
            fam,
        );
        for method in [Method::Korpelevich, Method::Popov] {
            let mut a = run_solver(&p, &config(method, 50, 9)).unwrap();
            let mut b = run_solver(&p, &config(method, 50, 9)).unwrap();
            for r in a.records.iter_mut().chain(b.records.iter_mut()) {
                r.elapsed_ns = 0;
            }
            assert_eq!(a, b);
            let c = run_solver(&p, &config(method, 50, 10)).unwrap();
            assert_ne!(a.x0, c.x0);
        }
    }

    #[test]
    fn iterates_stay_in_box_and_averages_are_convex_combinations() {
        let base = BoxSet::symmetric(2, 1.0).unwrap();
        let fam = ConstraintFamily::finite(
            vec![QuadraticConstraint::new(Matrix::identity(2), RealVec::zeros(2), 0.5).unwrap()],
            &base,
        )
        .unwrap();
        let p = linear_problem(
            Matrix::from_rows(&[vec![0.0, 2.0], vec![-2.0, 0.0]]).unwrap(),
            1.0,
            fam,
        );
        for method in [Method::Korpelevich, Method::Popov] {
            let t = run_solver(&p, &config(method, 300, 4)).unwrap();
            let mut lo = [f64::INFINITY; 2];
            let mut hi = [f64::NEG_INFINITY; 2];
            for r in &t.records {
                for pt in [&r.u, &r.v, &r.x] {
                    assert!(base.contains(pt));
                }
                for i in 0..2 {
                    lo[i] = lo[i].min(r.x[i]);
                    hi[i] = hi[i].max(r.x[i]);
                }
                for mode in AveragingMode::ALL {
                    let a = r.average(mode);
                    assert!(base.contains(a));
                    for i in 0..2 {
                        assert!(a[i] >= lo[i] - 1e-12 && a[i] <= hi[i] + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn solution_is_fixed_point_of_both_methods() {
        // F(x) = x has its zero at the origin, interior to the unit disk
        let base = BoxSet::symmetric(2, 1.0).unwrap();
        let fam = ConstraintFamily::finite(
            vec![QuadraticConstraint::new(Matrix::identity(2), RealVec::zeros(2), 0.5).unwrap()],
            &base,
        )
        .unwrap();
        let p = linear_problem(Matrix::identity(2), 0.0, fam);
        let x = RealVec::zeros(2);
        let s = korpelevich_step(&x, 0.4, &p, &mut SeededStream::new(0, 0)).unwrap();
        let pass = random_feasibility_pass(
            &s.v,
            5,
            p.family(),
            1.0,
            p.base_set(),
            &mut SeededStream::new(0, 1),
        )
        .unwrap();
        assert_eq!(pass.point, x);
        let s = popov_step(
            &x,
            &RealVec::zeros(2),
            0.4,
            &p,
            &mut SeededStream::new(0, 0),
        )
        .unwrap();
        let pass = random_feasibility_pass(
            &s.v,
            5,
            p.family(),
            1.0,
            p.base_set(),
            &mut SeededStream::new(0, 1),
        )
        .unwrap();
        assert_eq!(pass.point, x);
    }

    #[test]
    fn capped_steps_respect_cap() {
        let p = linear_problem(
            Matrix::from_rows(&[vec![0.0, 3.0], vec![-3.0, 0.0]]).unwrap(),
            0.0,
            ConstraintFamily::empty(),
        );
        let cap = crate::solvers::step_cap(0.1, p.oracle().lipschitz())
            .unwrap()
            .unwrap();
        let mut cfg = config(Method::Korpelevich, 200, 2);
        cfg.steps = StepSchedule::diminishing(1.0, Some(cap)).unwrap();
        let t = run_solver(&p, &cfg).unwrap();
        assert!(t.records.iter().all(|r| r.alpha <= cap));
        assert!(t.records.iter().any(|r| r.alpha == cap));
    }

    #[test]
    fn sample_counts_follow_rule() {
        let p = linear_problem(Matrix::identity(2), 0.0, ConstraintFamily::empty());
        let t = run_solver(&p, &config(Method::Popov, 30, 0)).unwrap();
        for r in &t.records {
            assert_eq!(r.n_k, SampleRule::Root(2.0).count(r.k as u64).unwrap());
            assert_eq!(r.sq_residuals.len() as u64, r.n_k);
        }
    }

    #[test]
    fn rejects_zero_horizon() {
        let p = linear_problem(Matrix::identity(2), 0.0, ConstraintFamily::empty());
        assert!(matches!(
            run_solver(&p, &config(Method::Popov, 0, 0)),
            Err(Error::Config(_))
        ));
    }
}
