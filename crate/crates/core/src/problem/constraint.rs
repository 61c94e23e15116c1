use std::borrow::Cow;
use std::fmt::Debug;
use std::ops::Range;
use std::sync::Arc;

use crate::numkit::{spectral_norm_power, BoxSet, Matrix, RealVec, SeededStream};
use crate::{Error, Result, Scalar};

/// Convex quadratic `g(x) = x_b^T B x_b + c^T x_b - d`, where `x_b` is the
/// block of the ambient vector starting at `offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticConstraint<T> {
    b: Matrix<T>,
    c: RealVec<T>,
    d: T,
    offset: usize,
    ambient_dim: usize,
    b_norm: T,
}

impl<T: Scalar> QuadraticConstraint<T> {
    /// `B` must be symmetric positive semidefinite.
    pub fn new(b: Matrix<T>, c: RealVec<T>, d: T) -> Result<Self> {
        if !b.is_square() {
            return Err(Error::InvalidInput(
                "constraint matrix must be square".into(),
            ));
        }
        Error::check_dim(b.rows(), c.dim())?;
        if !d.is_finite() {
            return Err(Error::InvalidInput(
                "constraint offset must be finite".into(),
            ));
        }
        let scale = T::one().max(b.max_abs());
        let tol = T::of(1e-10) * scale;
        if b.asymmetry() > tol {
            return Err(Error::InvalidInput(
                "constraint matrix must be symmetric".into(),
            ));
        }
        if !b.is_psd(tol) {
            return Err(Error::InvalidInput(
                "constraint matrix must be positive semidefinite".into(),
            ));
        }
        let b_norm = if b.is_zero() {
            T::zero()
        } else {
            let mut rng = SeededStream::new(0xb0b, 0);
            // power iteration approaches |B| from below; pad so M_g stays a bound
            spectral_norm_power(&b, 500, &mut rng)? * (T::one() + T::of(1e-9))
        };
        let n = c.dim();
        Ok(Self {
            b,
            c,
            d,
            offset: 0,
            ambient_dim: n,
            b_norm,
        })
    }

    /// Affine constraint `a^T x <= rhs`.
    pub fn affine(a: RealVec<T>, rhs: T) -> Result<Self> {
        let n = a.dim();
        Self::new(Matrix::zeros(n, n), a, rhs)
    }

    /// Same constraint acting on coordinates `offset..offset + block_dim` of a
    /// vector of dimension `ambient_dim`.
    pub fn on_block(mut self, offset: usize, ambient_dim: usize) -> Result<Self> {
        if offset + self.block_dim() > ambient_dim {
            return Err(Error::InvalidInput(format!(
                "block {}..{} does not fit in dimension {ambient_dim}",
                offset,
                offset + self.block_dim()
            )));
        }
        self.offset = offset;
        self.ambient_dim = ambient_dim;
        Ok(self)
    }

    pub fn block_dim(&self) -> usize {
        self.c.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn block(&self) -> Range<usize> {
        self.offset..self.offset + self.block_dim()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.b
    }

    pub fn linear(&self) -> &RealVec<T> {
        &self.c
    }

    pub fn rhs(&self) -> T {
        self.d
    }

    /// Upper bound on `|B|_2`.
    pub fn matrix_norm(&self) -> T {
        self.b_norm
    }

    fn block_of<'a>(&self, x: &'a RealVec<T>) -> &'a [T] {
        &x.as_slice()[self.block()]
    }

    pub fn value(&self, x: &RealVec<T>) -> Result<T> {
        Error::check_dim(self.ambient_dim, x.dim())?;
        Ok(self.value_unchecked(x))
    }

    pub(crate) fn value_unchecked(&self, x: &RealVec<T>) -> T {
        let xb = self.block_of(x);
        let bx = self.b.matvec_slice(xb);
        let quad: T = bx.iter().zip(xb).map(|(&a, &b)| a * b).sum();
        let lin: T = self.c.iter().zip(xb).map(|(&a, &b)| a * b).sum();
        quad + lin - self.d
    }

    /// `(max(g(x), 0), d)` with `d = 2 B x + c` lifted to the ambient space
    /// when `g(x) > 0`, and `d = e_1` otherwise.
    pub fn plus_subgradient(&self, x: &RealVec<T>) -> Result<(T, RealVec<T>)> {
        Error::check_dim(self.ambient_dim, x.dim())?;
        let g = self.value_unchecked(x);
        if g > T::zero() {
            Ok((g, self.gradient_unchecked(x)))
        } else {
            Ok((T::zero(), RealVec::unit(self.ambient_dim, 0)))
        }
    }

    pub(crate) fn gradient_unchecked(&self, x: &RealVec<T>) -> RealVec<T> {
        let two = T::of(2.0);
        let bx = self.b.matvec_slice(self.block_of(x));
        let mut d = RealVec::zeros(self.ambient_dim);
        let out = d.as_mut_slice();
        for (k, i) in self.block().enumerate() {
            out[i] = two * bx[k] + self.c[k];
        }
        d
    }

    /// `2 |B| r + |c|`, with `r` the largest norm of the block over `base`.
    pub fn subgradient_bound(&self, base: &BoxSet<T>) -> T {
        let r = base.max_norm_over(self.block());
        T::of(2.0) * self.b_norm * r + self.c.norm()
    }
}

/// `xᵀBx + cᵀx − d`
pub fn constraint_value<T: Scalar>(c: &QuadraticConstraint<T>, x: &RealVec<T>) -> Result<T> {
    c.value(x)
}

/// `(g⁺(x), d)` with `d ∈ ∂g(x)` when `g(x) > 0`.
pub fn constraint_plus_subgradient<T: Scalar>(
    c: &QuadraticConstraint<T>,
    x: &RealVec<T>,
) -> Result<(T, RealVec<T>)> {
    c.plus_subgradient(x)
}

/// Generator for families with (conceptually) infinitely many members.
pub trait ConstraintSampler<T>: Debug + Send + Sync {
    fn ambient_dim(&self) -> usize;

    /// Member at `index`.
    fn at(&self, index: u64) -> QuadraticConstraint<T>;

    /// Draws a member according to the family's sampling law. Defaults to a
    /// uniformly random 64-bit index.
    fn draw(&self, rng: &mut SeededStream) -> QuadraticConstraint<T> {
        self.at(rng.next_u64())
    }
}

#[derive(Clone, Debug)]
enum Members<T> {
    Finite(Vec<QuadraticConstraint<T>>),
    Sampled(Arc<dyn ConstraintSampler<T>>),
}

/// The family `{g_a}` whose level sets intersect to the constraint set `X`,
/// together with the subgradient bound `M_g` over the base set.
///
/// A finite family may be grouped: with group size `s` and `m` members,
/// index `i < m/s` stands for members `i, i + m/s, ..., i + (s-1)m/s`, and a
/// draw picks an index rather than a single member. This is how one sampled
/// constraint index is imposed on several players at once.
#[derive(Clone, Debug)]
pub struct ConstraintFamily<T> {
    members: Members<T>,
    subgrad_bound: T,
    group: usize,
}

impl<T: Scalar> ConstraintFamily<T> {
    /// Finite family; `M_g` is computed from the member data over `base`.
    pub fn finite(members: Vec<QuadraticConstraint<T>>, base: &BoxSet<T>) -> Result<Self> {
        for m in &members {
            Error::check_dim(base.dim(), m.ambient_dim())?;
        }
        let subgrad_bound = members
            .iter()
            .map(|m| m.subgradient_bound(base))
            .fold(T::zero(), T::max);
        Ok(Self {
            members: Members::Finite(members),
            subgrad_bound,
            group: 1,
        })
    }

    /// Finite family drawn in groups of `group` members sharing an index.
    pub fn finite_grouped(
        members: Vec<QuadraticConstraint<T>>,
        group: usize,
        base: &BoxSet<T>,
    ) -> Result<Self> {
        if group == 0 || !members.len().is_multiple_of(group) {
            return Err(Error::InvalidInput(format!(
                "{} members cannot be split into groups of {group}",
                members.len()
            )));
        }
        let mut fam = Self::finite(members, base)?;
        fam.group = group;
        Ok(fam)
    }

    pub fn empty() -> Self {
        Self {
            members: Members::Finite(Vec::new()),
            subgrad_bound: T::zero(),
            group: 1,
        }
    }

    /// Generative family. The caller vouches for `subgrad_bound`.
    pub fn sampled(sampler: Arc<dyn ConstraintSampler<T>>, subgrad_bound: T) -> Result<Self> {
        if !(subgrad_bound > T::zero()) {
            return Err(Error::InvalidInput(
                "subgradient bound must be positive".into(),
            ));
        }
        Ok(Self {
            members: Members::Sampled(sampler),
            subgrad_bound,
            group: 1,
        })
    }

    pub fn subgrad_bound(&self) -> T {
        self.subgrad_bound
    }

    /// Members of a finite family, `None` for generative ones.
    pub fn members(&self) -> Option<&[QuadraticConstraint<T>]> {
        match &self.members {
            Members::Finite(v) => Some(v),
            Members::Sampled(_) => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(&self.members, Members::Finite(v) if v.is_empty())
    }

    pub fn len(&self) -> Option<usize> {
        self.members().map(<[_]>::len)
    }

    pub fn group_size(&self) -> usize {
        self.group
    }

    /// Number of distinct indices a draw chooses from (finite families).
    pub fn num_indices(&self) -> Option<usize> {
        self.len().map(|n| n / self.group)
    }

    /// The members under one index drawn uniformly with replacement (finite)
    /// or one member from the sampler's law. Empty for an empty family.
    pub fn draw(&self, rng: &mut SeededStream) -> Vec<Cow<'_, QuadraticConstraint<T>>> {
        match &self.members {
            Members::Finite(v) if v.is_empty() => Vec::new(),
            Members::Finite(v) => {
                let stride = v.len() / self.group;
                let i = rng.index(stride);
                (0..self.group)
                    .map(|j| Cow::Borrowed(&v[i + j * stride]))
                    .collect()
            }
            Members::Sampled(s) => vec![Cow::Owned(s.draw(rng))],
        }
    }

    /// Members acting on exactly `block`, as a new finite family.
    pub fn restricted_to_block(&self, block: Range<usize>, base: &BoxSet<T>) -> Result<Self> {
        let members = self
            .members()
            .ok_or_else(|| Error::Unsupported("block restriction of a generative family".into()))?;
        Self::finite(
            members
                .iter()
                .filter(|m| m.block() == block)
                .cloned()
                .collect(),
            base,
        )
    }

    /// True when every member is satisfied at `x` (finite families only).
    pub fn is_feasible(&self, x: &RealVec<T>) -> Result<bool> {
        let members = self
            .members()
            .ok_or_else(|| Error::Unsupported("feasibility test on a generative family".into()))?;
        for m in members {
            if m.value(x)? > T::zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> RealVec<f64> {
        RealVec::from_f64(x).unwrap()
    }

    #[test]
    fn values() {
        let c = QuadraticConstraint::new(Matrix::identity(2), RealVec::zeros(2), 1.0).unwrap();
        assert_eq!(c.value(&v(&[1.0, 1.0])).unwrap(), 1.0);
        let lin = QuadraticConstraint::affine(v(&[1.0]), 0.0).unwrap();
        assert_eq!(lin.value(&v(&[-2.0])).unwrap(), -2.0);
        assert!(matches!(
            lin.value(&v(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn affine_subgradient() {
        // g(x) = x - 1
        let g = QuadraticConstraint::affine(v(&[1.0]), 1.0).unwrap();
        let (gp, d) = g.plus_subgradient(&v(&[3.0])).unwrap();
        assert_eq!(gp, 2.0);
        assert_eq!(d, v(&[1.0]));
        let (gp, d) = g.plus_subgradient(&v(&[0.0])).unwrap();
        assert_eq!(gp, 0.0);
        assert_eq!(d, v(&[1.0]));
    }

    #[test]
    fn block_lifting() {
        let g = QuadraticConstraint::affine(v(&[1.0, 2.0]), 0.0)
            .unwrap()
            .on_block(2, 4)
            .unwrap();
        let x = v(&[5.0, 5.0, 1.0, 1.0]);
        assert_eq!(g.value(&x).unwrap(), 3.0);
        let (_, d) = g.plus_subgradient(&x).unwrap();
        assert_eq!(d, v(&[0.0, 0.0, 1.0, 2.0]));
        assert!(QuadraticConstraint::affine(v(&[1.0, 2.0]), 0.0)
            .unwrap()
            .on_block(3, 4)
            .is_err());
    }

    #[test]
    fn rejects_indefinite() {
        let b = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        assert!(QuadraticConstraint::new(b, v(&[0.0, 0.0]), 0.0).is_err());
    }

    #[test]
    fn family_bound_and_draws() {
        let base = BoxSet::symmetric(2, 1.0).unwrap();
        let a = QuadraticConstraint::affine(v(&[3.0, 4.0]), 1.0).unwrap();
        let q =
            QuadraticConstraint::new(Matrix::from_diag(&[2.0, 1.0]), v(&[0.0, 1.0]), 0.0).unwrap();
        let fam = ConstraintFamily::finite(vec![a, q], &base).unwrap();
        // 2 * 2 * sqrt(2) + 1 beats 5
        let expected = 4.0 * 2f64.sqrt() + 1.0;
        assert!((fam.subgrad_bound() - expected).abs() < 1e-8);
        assert!(fam.subgrad_bound() >= expected);
        let mut rng = SeededStream::new(0, 0);
        for _ in 0..10 {
            assert_eq!(fam.draw(&mut rng).len(), 1);
        }
        assert!(ConstraintFamily::<f64>::empty().draw(&mut rng).is_empty());
    }

    #[test]
    fn grouped_draws_share_an_index() {
        let base = BoxSet::symmetric(2, 1.0).unwrap();
        let members: Vec<_> = (0..6)
            .map(|i| QuadraticConstraint::affine(v(&[1.0, 0.0]), i as f64).unwrap())
            .collect();
        let fam = ConstraintFamily::finite_grouped(members.clone(), 2, &base).unwrap();
        assert_eq!(fam.num_indices(), Some(3));
        let mut rng = SeededStream::new(1, 0);
        for _ in 0..20 {
            let d = fam.draw(&mut rng);
            assert_eq!(d.len(), 2);
            assert_eq!(d[1].rhs() - d[0].rhs(), 3.0);
        }
        assert!(ConstraintFamily::finite_grouped(members, 4, &base).is_err());
    }
}
