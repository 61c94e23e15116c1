//! Dense vectors and matrices, seeded random streams, box geometry and the
//! small amount of spectral machinery the solvers need.

mod boxset;
mod matrix;
mod rng;
mod spectral;
mod vector;

pub use boxset::BoxSet;
pub use matrix::Matrix;
pub use rng::SeededStream;
pub use spectral::{
    orthonormal_basis, random_sym_with_spectrum, spectral_norm_power, DEFAULT_POWER_ITERS,
};
pub use vector::RealVec;

use crate::{Error, Result, Scalar};

/// Componentwise clamp of `x` into `b`.
pub fn project_box<T: Scalar>(x: &RealVec<T>, b: &BoxSet<T>) -> Result<RealVec<T>> {
    b.project(x)
}

/// Uniform draw from the box.
pub fn sample_uniform_box<T: Scalar>(b: &BoxSet<T>, rng: &mut SeededStream) -> RealVec<T> {
    b.sample_uniform(rng)
}

/// Vector of i.i.d. `N(0, stddev^2)` coordinates.
pub fn gaussian_vector<T: Scalar>(
    dim: usize,
    stddev: T,
    rng: &mut SeededStream,
) -> Result<RealVec<T>> {
    if !(stddev >= T::zero()) || !stddev.is_finite() {
        return Err(Error::InvalidInput(format!(
            "standard deviation must be finite and nonnegative, got {stddev}"
        )));
    }
    let s = stddev.to_f64_lossy();
    Ok(RealVec::from_fn(dim, |_| T::of(s * rng.standard_normal())))
}
