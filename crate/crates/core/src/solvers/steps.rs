use crate::numkit::{RealVec, SeededStream};
use crate::problem::ProblemSpec;
use crate::{Result, Scalar};

/// Output of one extragradient step: `u` and `v` plus `|ξ|²` of the two
/// fresh draws.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtragradientStep<T> {
    pub u: RealVec<T>,
    pub v: RealVec<T>,
    pub noise_sq: [T; 2],
}

/// `u = Π_Y[x − α F̂(x, ξ¹)]`, `v = Π_Y[x − α F̂(u, ξ²)]`.
pub fn korpelevich_step<T: Scalar>(
    x_prev: &RealVec<T>,
    alpha: T,
    spec: &ProblemSpec<T>,
    rng: &mut SeededStream,
) -> Result<ExtragradientStep<T>> {
    let base = spec.base_set();
    let first = spec.map_sample_with_noise(x_prev, rng)?;
    let u = base.project(&x_prev.added_scaled(-alpha, &first.value))?;
    let second = spec.map_sample_with_noise(&u, rng)?;
    let v = base.project(&x_prev.added_scaled(-alpha, &second.value))?;
    Ok(ExtragradientStep {
        u,
        v,
        noise_sq: [first.noise.norm_sq(), second.noise.norm_sq()],
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PopovStep<T> {
    pub u: RealVec<T>,
    pub v: RealVec<T>,
    /// `F̂(u, ξ)`, reused by the next step
    pub fhat_new: RealVec<T>,
    pub noise_sq: T,
}

/// `u = Π_Y[x − α F̂_old]`, then one fresh draw `F̂(u, ξ)` and
/// `v = Π_Y[x − α F̂(u, ξ)]`.
pub fn popov_step<T: Scalar>(
    x_prev: &RealVec<T>,
    fhat_old: &RealVec<T>,
    alpha: T,
    spec: &ProblemSpec<T>,
    rng: &mut SeededStream,
) -> Result<PopovStep<T>> {
    let base = spec.base_set();
    let u = base.project(&x_prev.added_scaled(-alpha, fhat_old))?;
    let fresh = spec.map_sample_with_noise(&u, rng)?;
    let v = base.project(&x_prev.added_scaled(-alpha, &fresh.value))?;
    Ok(PopovStep {
        u,
        v,
        noise_sq: fresh.noise.norm_sq(),
        fhat_new: fresh.value,
    })
}
