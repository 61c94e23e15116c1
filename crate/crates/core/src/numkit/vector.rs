use std::ops::Index;

use crate::{Error, Result, Scalar};

/// Dense coordinate vector with finite entries.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct RealVec<T>(Vec<T>);

impl<T: Scalar> RealVec<T> {
    pub fn new(entries: Vec<T>) -> Result<Self> {
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite entry {} at index {i}",
                entries[i]
            )));
        }
        Ok(Self(entries))
    }

    /// Builds from `f64` values, converting each to `T`.
    pub fn from_f64(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&v| T::of(v)).collect())
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<T>) -> Self {
        Self(entries)
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize) -> T) -> Self {
        Self((0..dim).map(f).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![T::zero(); dim])
    }

    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[axis] = T::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn dot(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(&a, &b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn dist_sq(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum()
    }

    pub fn dist(&self, other: &Self) -> T {
        self.dist_sq(other).sqrt()
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self(self.0.iter().zip(&other.0).map(|(&a, &b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self(self.0.iter().zip(&other.0).map(|(&a, &b)| a - b).collect())
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.iter().map(|&a| a * s).collect())
    }

    /// `self += s * x`
    pub fn axpy(&mut self, s: T, x: &Self) {
        debug_assert_eq!(self.dim(), x.dim());
        for (a, &b) in self.0.iter_mut().zip(&x.0) {
            *a = *a + s * b;
        }
    }

    /// Returns `self + s * x` without modifying `self`.
    pub fn added_scaled(&self, s: T, x: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(s, x);
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max)
    }

    /// Converts every entry to `f64`.
    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.0.iter().map(|v| v.to_f64_lossy()).collect()
    }
}

impl<T> Index<usize> for RealVec<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}
