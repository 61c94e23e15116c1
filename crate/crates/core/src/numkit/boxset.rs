use super::{RealVec, SeededStream};
use crate::{Error, Result, Scalar};

/// Axis-aligned box `{x : lo <= x <= hi}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxSet<T> {
    lo: RealVec<T>,
    hi: RealVec<T>,
}

impl<T: Scalar> BoxSet<T> {
    pub fn new(lo: RealVec<T>, hi: RealVec<T>) -> Result<Self> {
        Error::check_dim(lo.dim(), hi.dim())?;
        if let Some(i) = (0..lo.dim()).find(|&i| lo[i] > hi[i]) {
            return Err(Error::InvalidInput(format!(
                "box bound lo[{i}] = {} exceeds hi[{i}] = {}",
                lo[i], hi[i]
            )));
        }
        Ok(Self { lo, hi })
    }

    /// `[-r, r]^dim`
    pub fn symmetric(dim: usize, r: T) -> Result<Self> {
        Self::new(RealVec::new(vec![-r; dim])?, RealVec::new(vec![r; dim])?)
    }

    /// `[lo, hi]^dim`
    pub fn cube(dim: usize, lo: T, hi: T) -> Result<Self> {
        Self::new(RealVec::new(vec![lo; dim])?, RealVec::new(vec![hi; dim])?)
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    pub fn lo(&self) -> &RealVec<T> {
        &self.lo
    }

    pub fn hi(&self) -> &RealVec<T> {
        &self.hi
    }

    /// Squared diameter `sum (hi - lo)^2`, the `D` of the step-size bounds.
    pub fn diameter_sq(&self) -> T {
        self.lo.dist_sq(&self.hi)
    }

    /// Largest Euclidean norm attained in the box over coordinates `range`.
    pub fn max_norm_over(&self, range: std::ops::Range<usize>) -> T {
        range
            .map(|i| {
                let m = self.lo[i].abs().max(self.hi[i].abs());
                m * m
            })
            .sum::<T>()
            .sqrt()
    }

    pub fn contains(&self, x: &RealVec<T>) -> bool {
        x.dim() == self.dim() && (0..self.dim()).all(|i| x[i] >= self.lo[i] && x[i] <= self.hi[i])
    }

    pub fn project(&self, x: &RealVec<T>) -> Result<RealVec<T>> {
        Error::check_dim(self.dim(), x.dim())?;
        Ok(self.project_unchecked(x))
    }

    pub(crate) fn project_unchecked(&self, x: &RealVec<T>) -> RealVec<T> {
        RealVec::from_fn(x.dim(), |i| x[i].max(self.lo[i]).min(self.hi[i]))
    }

    pub fn sample_uniform(&self, rng: &mut SeededStream) -> RealVec<T> {
        RealVec::from_fn(self.dim(), |i| {
            let lo = self.lo[i].to_f64_lossy();
            let hi = self.hi[i].to_f64_lossy();
            // rounding into T can land just outside a narrow box
            T::of(rng.uniform(lo, hi)).max(self.lo[i]).min(self.hi[i])
        })
    }
}
