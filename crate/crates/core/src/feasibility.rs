//! Randomized feasibility passes: sequential Polyak subgradient steps on
//! sampled constraints, each followed by projection onto the base box.

use crate::numkit::{BoxSet, RealVec, SeededStream};
use crate::problem::ConstraintFamily;
use crate::{Error, Result, Scalar};

/// Number of feasibility steps `N_k` taken at outer iteration `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SampleRule {
    /// `N_k = n`
    Constant(u64),
    /// `N_k = ceil(k^(1/r))`, `r >= 1`
    Root(f64),
    /// `N_k = max(1, ceil(log_base k))`, `base > 1`
    Log(f64),
    /// `N_k = max(n, ceil(k^(1/r)))`
    MaxRoot { floor: u64, r: f64 },
}

impl SampleRule {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        match *self {
            SampleRule::Constant(n) if n < 1 => bad("constant sample count must be >= 1".into()),
            SampleRule::Root(r) | SampleRule::MaxRoot { r, .. }
                if !(r >= 1.0) || !r.is_finite() =>
            {
                bad(format!("root order must be >= 1, got {r}"))
            }
            SampleRule::MaxRoot { floor, .. } if floor < 1 => {
                bad("sample count floor must be >= 1".into())
            }
            SampleRule::Log(m) if !(m > 1.0) || !m.is_finite() => {
                bad(format!("log base must be > 1, got {m}"))
            }
            _ => Ok(()),
        }
    }

    /// `N_k` for `k >= 1`.
    pub fn count(&self, k: u64) -> Result<u64> {
        self.validate()?;
        if k == 0 {
            return Err(Error::InvalidInput("iteration index starts at 1".into()));
        }
        Ok(match *self {
            SampleRule::Constant(n) => n,
            SampleRule::Root(r) => ceil_root(k, r),
            SampleRule::Log(m) => ceil_log(k, m).max(1),
            SampleRule::MaxRoot { floor, r } => ceil_root(k, r).max(floor),
        })
    }
}

/// `ceil(k^(1/r))`, corrected for `powf` rounding at perfect powers.
fn ceil_root(k: u64, r: f64) -> u64 {
    let kf = k as f64;
    let mut n = kf.powf(r.recip()).ceil() as u64;
    while n > 1 && ((n - 1) as f64).powf(r) >= kf {
        n -= 1;
    }
    while (n as f64).powf(r) < kf {
        n += 1;
    }
    n.max(1)
}

/// `ceil(log_m k)`, corrected the same way.
fn ceil_log(k: u64, m: f64) -> u64 {
    let kf = k as f64;
    let mut n = (kf.ln() / m.ln()).ceil().max(0.0) as u64;
    while n > 0 && m.powf((n - 1) as f64) >= kf {
        n -= 1;
    }
    while m.powf(n as f64) < kf {
        n += 1;
    }
    n
}

pub fn sample_count(rule: &SampleRule, k: u64) -> Result<u64> {
    rule.count(k)
}

/// Relaxation `β ∈ (0, 2)` and the per-iteration sample-count rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeasibilityConfig<T> {
    pub beta: T,
    pub schedule: SampleRule,
}

impl<T: Scalar> FeasibilityConfig<T> {
    pub fn new(beta: T, schedule: SampleRule) -> Result<Self> {
        let cfg = Self { beta, schedule };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_beta(self.beta)?;
        self.schedule.validate()
    }
}

fn check_beta<T: Scalar>(beta: T) -> Result<()> {
    if beta > T::zero() && beta < T::of(2.0) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "beta must lie in the open interval (0, 2), got {beta}"
        )))
    }
}

/// `Π_Y[z − β g⁺/|d|² d]`, or `z` unchanged when `g⁺ = 0`.
pub fn polyak_step<T: Scalar>(
    z: &RealVec<T>,
    gplus: T,
    d: &RealVec<T>,
    beta: T,
    base: &BoxSet<T>,
) -> Result<RealVec<T>> {
    if !(gplus > T::zero()) {
        return Ok(z.clone());
    }
    Error::check_dim(z.dim(), d.dim())?;
    let dn = d.norm_sq();
    if dn.is_zero() {
        return Err(Error::DegenerateSubgradient {
            violation: gplus.to_f64_lossy(),
        });
    }
    base.project(&z.added_scaled(-beta * gplus / dn, d))
}

/// Final point of a feasibility pass and the `(g⁺)²` value met at each step.
#[derive(Clone, Debug, PartialEq)]
pub struct PassOutcome<T> {
    pub point: RealVec<T>,
    pub sq_residuals: Vec<T>,
}

/// `n` sequential draws from `family` (uniformly with replacement for finite
/// families) starting at `v`, with one Polyak step per drawn member.
pub fn random_feasibility_pass<T: Scalar>(
    v: &RealVec<T>,
    n: u64,
    family: &ConstraintFamily<T>,
    beta: T,
    base: &BoxSet<T>,
    rng: &mut SeededStream,
) -> Result<PassOutcome<T>> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "feasibility pass needs at least one step".into(),
        ));
    }
    check_beta(beta)?;
    Error::check_dim(base.dim(), v.dim())?;
    let mut z = v.clone();
    let mut sq_residuals = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let drawn = family.draw(rng);
        if drawn.is_empty() {
            sq_residuals.push(T::zero());
        }
        for member in drawn {
            let (gplus, d) = member.plus_subgradient(&z)?;
            sq_residuals.push(gplus * gplus);
            if gplus > T::zero() {
                z = polyak_step(&z, gplus, &d, beta, base)?;
            }
        }
    }
    Ok(PassOutcome {
        point: z,
        sq_residuals,
    })
}

/// Contraction quantity `q = β(2 − β) / (c M_g²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Contraction<T> {
    /// `min(q_raw, 1)`
    pub q: T,
    pub raw: T,
    /// Set when `q_raw > 1`, which means `c` or `M_g` is inconsistent with
    /// the error bound it is meant to satisfy.
    pub clamped: bool,
}

pub fn compute_q<T: Scalar>(beta: T, c: T, mg: T) -> Result<Contraction<T>> {
    check_beta(beta)?;
    if !(c > T::zero()) || !(mg > T::zero()) {
        return Err(Error::Config(format!(
            "regularity constant and subgradient bound must be > 0, got c = {c}, M_g = {mg}"
        )));
    }
    let raw = beta * (T::of(2.0) - beta) / (c * mg * mg);
    Ok(Contraction {
        q: raw.min(T::one()),
        raw,
        clamped: raw > T::one(),
    })
}
