use std::ops::Range;

use crate::metrics::{dykstra_projection, Halfspace};
use crate::numkit::{BoxSet, Matrix, RealVec, SeededStream};
use crate::problem::{
    AffineMap, ConstraintFamily, MappingOracle, ProblemSpec, QuadraticConstraint,
};
use crate::{Error, Result, Scalar};

const DYKSTRA_SWEEPS: usize = 20_000;

/// A problem together with a point known to satisfy every constraint, and an
/// exact projection onto `S` when `S` is a box cut by halfspaces.
#[derive(Clone, Debug)]
pub struct WitnessedProblem<T> {
    spec: ProblemSpec<T>,
    witness: RealVec<T>,
    halfspaces: Option<Vec<Halfspace<T>>>,
}

impl<T: Scalar> WitnessedProblem<T> {
    /// Finds a witness by uniform rejection sampling. When every constraint
    /// reads only one of the problem's coordinate blocks, each block is
    /// sampled separately, which keeps the acceptance rate workable for
    /// product sets.
    pub fn new(
        spec: ProblemSpec<T>,
        max_candidates: usize,
        rng: &mut SeededStream,
    ) -> Result<Self> {
        let witness = find_witness(&spec, max_candidates, rng)?;
        Ok(Self {
            spec,
            witness,
            halfspaces: None,
        })
    }

    /// Checks `witness` instead of searching.
    pub fn with_witness(spec: ProblemSpec<T>, witness: RealVec<T>) -> Result<Self> {
        Error::check_dim(spec.dim(), witness.dim())?;
        if !spec.base_set().contains(&witness) || !spec.family().is_feasible(&witness)? {
            return Err(Error::InvalidInput("witness is not feasible".into()));
        }
        Ok(Self {
            spec,
            witness,
            halfspaces: None,
        })
    }

    /// `base ∩ {aᵢᵀx <= bᵢ}` with the zero mapping and an exact projection.
    pub fn from_halfspaces(
        base: BoxSet<T>,
        halfspaces: Vec<Halfspace<T>>,
        max_candidates: usize,
        rng: &mut SeededStream,
    ) -> Result<Self> {
        let n = base.dim();
        let members = halfspaces
            .iter()
            .map(|h| QuadraticConstraint::affine(h.normal.clone(), h.offset))
            .collect::<Result<Vec<_>>>()?;
        let family = ConstraintFamily::finite(members, &base)?;
        let oracle = MappingOracle::affine(AffineMap::linear(Matrix::zeros(n, n))?, T::zero())?;
        let spec = ProblemSpec::new(oracle, base, family)?;
        let mut wp = Self::new(spec, max_candidates, rng)?;
        wp.halfspaces = Some(halfspaces);
        Ok(wp)
    }

    pub fn spec(&self) -> &ProblemSpec<T> {
        &self.spec
    }

    pub fn witness(&self) -> &RealVec<T> {
        &self.witness
    }

    pub fn halfspaces(&self) -> Option<&[Halfspace<T>]> {
        self.halfspaces.as_deref()
    }

    pub fn has_exact_projection(&self) -> bool {
        self.halfspaces.is_some()
    }

    pub fn project(&self, x: &RealVec<T>) -> Result<RealVec<T>> {
        let hs = self
            .halfspaces
            .as_ref()
            .ok_or_else(|| Error::Unsupported("no exact projection for this problem".into()))?;
        dykstra_projection(x, self.spec.base_set(), hs, DYKSTRA_SWEEPS)
    }

    pub fn distance(&self, x: &RealVec<T>) -> Result<T> {
        Ok(x.dist(&self.project(x)?))
    }
}

fn find_witness<T: Scalar>(
    spec: &ProblemSpec<T>,
    max_candidates: usize,
    rng: &mut SeededStream,
) -> Result<RealVec<T>> {
    let members = spec
        .family()
        .members()
        .ok_or_else(|| Error::Unsupported("witness search over a generative family".into()))?;
    let blocks = spec.blocks();
    let separable = blocks.len() > 1 && members.iter().all(|m| blocks.contains(&m.block()));
    if !separable {
        return reject(
            spec,
            0..spec.dim(),
            members.iter().collect(),
            max_candidates,
            rng,
            None,
        );
    }
    let mut x = spec.base_set().sample_uniform(rng);
    for block in blocks {
        let on_block = members.iter().filter(|m| m.block() == *block).collect();
        x = reject(spec, block.clone(), on_block, max_candidates, rng, Some(x))?;
    }
    Ok(x)
}

fn reject<T: Scalar>(
    spec: &ProblemSpec<T>,
    block: Range<usize>,
    members: Vec<&QuadraticConstraint<T>>,
    max_candidates: usize,
    rng: &mut SeededStream,
    fill: Option<RealVec<T>>,
) -> Result<RealVec<T>> {
    for _ in 0..max_candidates {
        let draw = spec.base_set().sample_uniform(rng);
        let mut x = fill.clone().unwrap_or_else(|| draw.clone());
        x.as_mut_slice()[block.clone()].copy_from_slice(&draw.as_slice()[block.clone()]);
        let mut ok = true;
        for m in &members {
            if m.value(&x)? > T::zero() {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(x);
        }
    }
    Err(Error::EmptyCloud {
        candidates: max_candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::GameParams;

    fn v(x: &[f64]) -> RealVec<f64> {
        RealVec::from_f64(x).unwrap()
    }

    #[test]
    fn halfspace_problem_has_feasible_witness() {
        let mut rng = SeededStream::new(3, 0);
        let wp = WitnessedProblem::from_halfspaces(
            BoxSet::symmetric(2, 1.0).unwrap(),
            vec![Halfspace::new(v(&[1.0, 1.0]), 0.5).unwrap()],
            1000,
            &mut rng,
        )
        .unwrap();
        let w = wp.witness();
        assert!(w[0] + w[1] <= 0.5);
        assert_eq!(wp.distance(w).unwrap(), 0.0);
        let d = wp.distance(&v(&[1.0, 1.0])).unwrap();
        assert!((d - 1.5 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn game_witness_satisfies_every_member() {
        let mut rng = SeededStream::new(11, 0);
        let game = GameParams::default().generate::<f64>(&mut rng).unwrap();
        let wp = WitnessedProblem::new(game.spec, 100_000, &mut rng.fork(9)).unwrap();
        assert!(wp.spec().family().is_feasible(wp.witness()).unwrap());
        assert!(wp.spec().base_set().contains(wp.witness()));
        assert!(!wp.has_exact_projection());
    }

    #[test]
    fn infeasible_witness_rejected() {
        let mut rng = SeededStream::new(3, 0);
        let wp = WitnessedProblem::from_halfspaces(
            BoxSet::symmetric(2, 1.0).unwrap(),
            vec![Halfspace::new(v(&[1.0, 0.0]), 0.0).unwrap()],
            1000,
            &mut rng,
        )
        .unwrap();
        let spec = wp.spec().clone();
        assert!(WitnessedProblem::with_witness(spec.clone(), v(&[0.5, 0.0])).is_err());
        assert!(WitnessedProblem::with_witness(spec, v(&[-0.5, 0.0])).is_ok());
    }
}
