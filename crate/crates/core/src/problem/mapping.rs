use std::fmt::Debug;
use std::sync::Arc;

use crate::numkit::{
    gaussian_vector, spectral_norm_power, Matrix, RealVec, SeededStream, DEFAULT_POWER_ITERS,
};
use crate::{Error, Result, Scalar};

/// Deterministic part `F` of the stochastic mapping.
pub trait MeanMap<T>: Debug + Send + Sync {
    fn dim(&self) -> usize;

    /// Evaluates `F(x)`. `x` has dimension [`MeanMap::dim`].
    fn apply(&self, x: &RealVec<T>) -> RealVec<T>;
}

/// `F(x) = A x + b`.
#[derive(Clone, Debug)]
pub struct AffineMap<T> {
    matrix: Matrix<T>,
    shift: RealVec<T>,
}

impl<T: Scalar> AffineMap<T> {
    pub fn new(matrix: Matrix<T>, shift: RealVec<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidInput(
                "affine map needs a square matrix".into(),
            ));
        }
        Error::check_dim(matrix.rows(), shift.dim())?;
        Ok(Self { matrix, shift })
    }

    pub fn linear(matrix: Matrix<T>) -> Result<Self> {
        let n = matrix.rows();
        Self::new(matrix, RealVec::zeros(n))
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }
}

impl<T: Scalar> MeanMap<T> for AffineMap<T> {
    fn dim(&self) -> usize {
        self.matrix.rows()
    }

    fn apply(&self, x: &RealVec<T>) -> RealVec<T> {
        self.matrix.matvec_slice(x.as_slice()).add(&self.shift)
    }
}

/// Sampling oracle `F_hat(x, xi) = F(x) + xi` with `xi ~ N(0, s^2 I)`.
///
/// Carries the growth constants `L` and `M` of
/// `|F(x) - F(y)| <= L |x - y| + M` over the base set.
#[derive(Clone, Debug)]
pub struct MappingOracle<T> {
    mean_map: Arc<dyn MeanMap<T>>,
    noise_stddev: T,
    lipschitz: T,
    growth_offset: T,
}

/// One stochastic evaluation together with the noise that was added.
#[derive(Clone, Debug)]
pub struct MapSample<T> {
    pub value: RealVec<T>,
    pub noise: RealVec<T>,
}

impl<T: Scalar> MappingOracle<T> {
    pub fn new(
        mean_map: Arc<dyn MeanMap<T>>,
        noise_stddev: T,
        lipschitz: T,
        growth_offset: T,
    ) -> Result<Self> {
        for (name, v) in [
            ("noise standard deviation", noise_stddev),
            ("Lipschitz constant", lipschitz),
            ("growth offset", growth_offset),
        ] {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(Self {
            mean_map,
            noise_stddev,
            lipschitz,
            growth_offset,
        })
    }

    /// Affine oracle with `L = |A|_2` from the power method and `M = 0`.
    pub fn affine(map: AffineMap<T>, noise_stddev: T) -> Result<Self> {
        // fixed stream so L, and hence any step cap, is a function of A alone
        let mut rng = SeededStream::new(0x5eed_0f1a, 0);
        let l = spectral_norm_power(map.matrix(), DEFAULT_POWER_ITERS, &mut rng)?;
        Self::new(Arc::new(map), noise_stddev, l, T::zero())
    }

    pub fn dim(&self) -> usize {
        self.mean_map.dim()
    }

    pub fn mean_map(&self) -> &Arc<dyn MeanMap<T>> {
        &self.mean_map
    }

    pub fn noise_stddev(&self) -> T {
        self.noise_stddev
    }

    pub fn lipschitz(&self) -> T {
        self.lipschitz
    }

    pub fn growth_offset(&self) -> T {
        self.growth_offset
    }

    /// Bound on `E|xi|^2`, i.e. `s^2 * dim`.
    pub fn noise_variance_bound(&self) -> T {
        self.noise_stddev * self.noise_stddev * T::of(self.dim() as f64)
    }

    pub fn mean(&self, x: &RealVec<T>) -> RealVec<T> {
        self.mean_map.apply(x)
    }

    pub fn sample(&self, x: &RealVec<T>, rng: &mut SeededStream) -> MapSample<T> {
        let noise = if self.noise_stddev.is_zero() {
            RealVec::zeros(self.dim())
        } else {
            gaussian_vector(self.dim(), self.noise_stddev, rng)
                .expect("noise standard deviation validated at construction")
        };
        MapSample {
            value: self.mean(x).add(&noise),
            noise,
        }
    }
}

/// `B = L sqrt(D) + M + |F(x_ref)|`, a bound on `|F|` over a base set of
/// squared diameter `D`.
pub fn operator_bound<T: Scalar>(l: T, d: T, m: T, fref_norm: T) -> Result<T> {
    for (name, v) in [("L", l), ("D", d), ("M", m), ("|F(x_ref)|", fref_norm)] {
        if !(v >= T::zero()) {
            return Err(Error::InvalidInput(format!("{name} must be >= 0, got {v}")));
        }
    }
    Ok(l * d.sqrt() + m + fref_norm)
}
