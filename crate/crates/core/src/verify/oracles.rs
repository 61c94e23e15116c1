use crate::numkit::RealVec;
use crate::problem::QuadraticConstraint;
use crate::{Error, Result, Scalar};

use super::WitnessedProblem;

/// Nearest feasible point of the grid `lo + pitch·i` over the base box.
///
/// Its distance to `x` exceeds `dist(x, S)` by at most `pitch·√dim`. The
/// point itself is that close to the projection only when the boundary near
/// the projection is aligned with the grid; for oblique boundaries it may
/// slide along the boundary.
pub fn brute_force_projection_grid<T: Scalar>(
    x: &RealVec<T>,
    wp: &WitnessedProblem<T>,
    pitch: T,
) -> Result<RealVec<T>> {
    let base = wp.spec().base_set();
    let n = base.dim();
    Error::check_dim(n, x.dim())?;
    if n > 3 {
        return Err(Error::InvalidInput(
            "grid projection is limited to 3 dimensions".into(),
        ));
    }
    if !(pitch > T::zero()) {
        return Err(Error::InvalidInput("grid pitch must be positive".into()));
    }
    let counts: Vec<usize> = (0..n)
        .map(|i| {
            let span = (base.hi()[i] - base.lo()[i]) / pitch;
            span.floor().to_usize().unwrap_or(0) + 1
        })
        .collect();
    let total: usize = counts.iter().product();
    let mut best: Option<(T, RealVec<T>)> = None;
    let mut p = RealVec::zeros(n);
    for flat in 0..total {
        let mut rest = flat;
        for i in 0..n {
            let idx = rest % counts[i];
            rest /= counts[i];
            p.as_mut_slice()[i] = base.lo()[i] + pitch * T::of(idx as f64);
        }
        let d = p.dist_sq(x);
        if best.as_ref().is_some_and(|(bd, _)| d >= *bd) {
            continue;
        }
        if wp.spec().family().is_feasible(&p)? {
            best = Some((d, p.clone()));
        }
    }
    best.map(|(_, p)| p)
        .ok_or(Error::EmptyCloud { candidates: total })
}

/// Largest coordinate gap between the returned subgradient and a central
/// difference of `g` with step `h`. Requires `g(x) > 0`.
pub fn finite_diff_subgrad_check<T: Scalar>(
    constraint: &QuadraticConstraint<T>,
    x: &RealVec<T>,
    h: T,
) -> Result<T> {
    if !(h > T::zero()) {
        return Err(Error::InvalidInput(
            "difference step must be positive".into(),
        ));
    }
    let (gplus, d) = constraint.plus_subgradient(x)?;
    if !(gplus > T::zero()) {
        return Err(Error::InvalidInput(
            "subgradient check needs g(x) > 0".into(),
        ));
    }
    let two = T::of(2.0);
    let mut worst = T::zero();
    for i in 0..x.dim() {
        let mut fwd = x.clone();
        let mut bwd = x.clone();
        fwd.as_mut_slice()[i] = x[i] + h;
        bwd.as_mut_slice()[i] = x[i] - h;
        let fd = (constraint.value(&fwd)? - constraint.value(&bwd)?) / (two * h);
        worst = worst.max((fd - d[i]).abs());
    }
    Ok(worst)
}
