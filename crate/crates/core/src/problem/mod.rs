//! Problem descriptions: the stochastic mapping, the base box, the convex
//! constraint family, and the zero-sum matrix game generator.

mod constraint;
mod game;
mod mapping;

use std::ops::Range;

pub use constraint::{
    constraint_plus_subgradient, constraint_value, ConstraintFamily, ConstraintSampler,
    QuadraticConstraint,
};
pub use game::{make_zero_sum_game, GameInstance, GameParams};
pub use mapping::{operator_bound, AffineMap, MapSample, MappingOracle, MeanMap};

use crate::numkit::{BoxSet, RealVec, SeededStream};
use crate::{Error, Result, Scalar};

/// A stochastic VI over `S = X ∩ Y` with `Y` a box and `X` the intersection
/// of the family's level sets. `S` is assumed nonempty.
#[derive(Clone, Debug)]
pub struct ProblemSpec<T> {
    oracle: MappingOracle<T>,
    base_set: BoxSet<T>,
    family: ConstraintFamily<T>,
    regularity_c: Option<T>,
    blocks: Vec<Range<usize>>,
}

impl<T: Scalar> ProblemSpec<T> {
    pub fn new(
        oracle: MappingOracle<T>,
        base_set: BoxSet<T>,
        family: ConstraintFamily<T>,
    ) -> Result<Self> {
        Error::check_dim(base_set.dim(), oracle.dim())?;
        let n = base_set.dim();
        Ok(Self {
            oracle,
            base_set,
            family,
            regularity_c: None,
            blocks: vec![0..n],
        })
    }

    /// Records the linear-regularity constant `c` if it is known.
    pub fn with_regularity(mut self, c: T) -> Result<Self> {
        if !(c > T::zero()) {
            return Err(Error::InvalidInput(format!(
                "regularity constant must be > 0, got {c}"
            )));
        }
        self.regularity_c = Some(c);
        Ok(self)
    }

    /// Splits the coordinates into player blocks for per-block reporting.
    pub fn with_blocks(mut self, blocks: Vec<Range<usize>>) -> Result<Self> {
        let mut next = 0;
        for b in &blocks {
            if b.start != next || b.end < b.start {
                return Err(Error::InvalidInput(
                    "blocks must tile the coordinates in order".into(),
                ));
            }
            next = b.end;
        }
        Error::check_dim(self.dim(), next)?;
        self.blocks = blocks;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.base_set.dim()
    }

    pub fn oracle(&self) -> &MappingOracle<T> {
        &self.oracle
    }

    pub fn base_set(&self) -> &BoxSet<T> {
        &self.base_set
    }

    pub fn family(&self) -> &ConstraintFamily<T> {
        &self.family
    }

    pub fn regularity_c(&self) -> Option<T> {
        self.regularity_c
    }

    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    fn check_in_base(&self, x: &RealVec<T>) -> Result<()> {
        Error::check_dim(self.dim(), x.dim())?;
        if !self.base_set.contains(x) {
            return Err(Error::ContractViolation(
                "mapping evaluated outside the base set".into(),
            ));
        }
        Ok(())
    }

    /// `F_hat(x, xi)` for a fresh noise draw.
    pub fn map_sample(&self, x: &RealVec<T>, rng: &mut SeededStream) -> Result<RealVec<T>> {
        Ok(self.map_sample_with_noise(x, rng)?.value)
    }

    pub fn map_sample_with_noise(
        &self,
        x: &RealVec<T>,
        rng: &mut SeededStream,
    ) -> Result<MapSample<T>> {
        self.check_in_base(x)?;
        Ok(self.oracle.sample(x, rng))
    }

    /// `F(x)`
    pub fn map_mean(&self, x: &RealVec<T>) -> Result<RealVec<T>> {
        self.check_in_base(x)?;
        Ok(self.oracle.mean(x))
    }

    /// `B = L sqrt(D) + M + |F(x_ref)|` with `x_ref` the center of the box.
    pub fn operator_bound(&self) -> Result<T> {
        let half = T::of(0.5);
        let center = self.base_set.lo().add(self.base_set.hi()).scale(half);
        operator_bound(
            self.oracle.lipschitz(),
            self.base_set.diameter_sq(),
            self.oracle.growth_offset(),
            self.oracle.mean(&center).norm(),
        )
    }
}
