use crate::numkit::{BoxSet, RealVec};
use crate::{Error, Result, Scalar};

/// `{x : aᵀx <= b}`
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace<T> {
    pub normal: RealVec<T>,
    pub offset: T,
}

impl<T: Scalar> Halfspace<T> {
    pub fn new(normal: RealVec<T>, offset: T) -> Result<Self> {
        if normal.norm_sq().is_zero() {
            return Err(Error::InvalidInput(
                "halfspace normal must be nonzero".into(),
            ));
        }
        Ok(Self { normal, offset })
    }

    pub fn violation(&self, x: &RealVec<T>) -> T {
        self.normal.dot(x) - self.offset
    }

    pub fn project(&self, x: &RealVec<T>) -> RealVec<T> {
        let viol = self.violation(x);
        if viol <= T::zero() {
            x.clone()
        } else {
            x.added_scaled(-viol / self.normal.norm_sq(), &self.normal)
        }
    }
}

/// Projection of `x` onto `box ∩ halfspaces` by Dykstra's alternating
/// projections, cycling box first. Stops after `iters` sweeps or once a full
/// sweep leaves the iterate and all correction terms unchanged.
pub fn dykstra_projection<T: Scalar>(
    x: &RealVec<T>,
    base: &BoxSet<T>,
    halfspaces: &[Halfspace<T>],
    iters: usize,
) -> Result<RealVec<T>> {
    Error::check_dim(base.dim(), x.dim())?;
    for h in halfspaces {
        Error::check_dim(base.dim(), h.normal.dim())?;
    }
    if iters == 0 {
        return Err(Error::InvalidInput(
            "Dykstra needs at least one sweep".into(),
        ));
    }
    let sets = halfspaces.len() + 1;
    let mut corrections = vec![RealVec::zeros(x.dim()); sets];
    let mut z = x.clone();
    for _ in 0..iters {
        let mut moved = T::zero();
        for (i, p) in corrections.iter_mut().enumerate() {
            let y = z.add(p);
            let next = if i == 0 {
                base.project(&y)?
            } else {
                halfspaces[i - 1].project(&y)
            };
            let new_p = y.sub(&next);
            moved = moved.max(next.max_abs_diff(&z)).max(new_p.max_abs_diff(p));
            *p = new_p;
            z = next;
        }
        if moved.is_zero() {
            break;
        }
    }
    Ok(z)
}

/// `|x − Π_S(x)|` for a caller-supplied projection onto `S`.
pub fn distance_to_feasible<T: Scalar>(
    x: &RealVec<T>,
    project: impl Fn(&RealVec<T>) -> RealVec<T>,
) -> T {
    x.dist(&project(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::SeededStream;
    use proptest::prelude::*;

    fn v(x: &[f64]) -> RealVec<f64> {
        RealVec::from_f64(x).unwrap()
    }

    /// Projection onto `[-1,1]^2 ∩ {aᵀx <= b}` by enumerating candidate
    /// points: the unconstrained halfspace projection, the box clamp, and the
    /// two points where the boundary line meets each box edge.
    fn case_analysis(x: &RealVec<f64>, h: &Halfspace<f64>) -> RealVec<f64> {
        let inside =
            |p: &RealVec<f64>| p.iter().all(|c| c.abs() <= 1.0 + 1e-12) && h.violation(p) <= 1e-12;
        let mut candidates = vec![];
        let clamp = v(&[x[0].clamp(-1.0, 1.0), x[1].clamp(-1.0, 1.0)]);
        candidates.push(clamp.clone());
        candidates.push(h.project(x));
        // points on the line a·p = b nearest x, restricted to each edge
        let (a0, a1, b) = (h.normal[0], h.normal[1], h.offset);
        for fixed in [-1.0, 1.0] {
            if a1 != 0.0 {
                candidates.push(v(&[fixed, (b - a0 * fixed) / a1]));
            }
            if a0 != 0.0 {
                candidates.push(v(&[(b - a1 * fixed) / a0, fixed]));
            }
        }
        // box corners and clamped halfspace projections along each edge
        for c0 in [-1.0, 1.0] {
            for c1 in [-1.0, 1.0] {
                candidates.push(v(&[c0, c1]));
            }
            let on_vertical = v(&[c0, x[1].clamp(-1.0, 1.0)]);
            candidates.push(on_vertical);
            let on_horizontal = v(&[x[0].clamp(-1.0, 1.0), c0]);
            candidates.push(on_horizontal);
        }
        candidates
            .into_iter()
            .filter(inside)
            .min_by(|p, q| p.dist_sq(x).partial_cmp(&q.dist_sq(x)).unwrap())
            .expect("intersection nonempty")
    }

    #[test]
    fn interior_point_unchanged() {
        let b = BoxSet::symmetric(2, 1.0).unwrap();
        let h = Halfspace::new(v(&[1.0, 1.0]), 0.5).unwrap();
        let x = v(&[0.1, -0.3]);
        assert_eq!(dykstra_projection(&x, &b, &[h], 100).unwrap(), x);
    }

    #[test]
    fn box_only_equals_clamp() {
        let b = BoxSet::symmetric(2, 1.0).unwrap();
        let x = v(&[3.0, -0.2]);
        assert_eq!(
            dykstra_projection(&x, &b, &[], 10).unwrap(),
            b.project(&x).unwrap()
        );
    }

    #[test]
    fn matches_case_analysis_in_2d() {
        let b = BoxSet::symmetric(2, 1.0).unwrap();
        let mut rng = SeededStream::new(17, 0);
        for _ in 0..200 {
            let theta = rng.uniform(0.0, std::f64::consts::TAU);
            let h = Halfspace::new(v(&[theta.cos(), theta.sin()]), rng.uniform(-0.5, 0.5)).unwrap();
            let x = v(&[rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)]);
            let p = dykstra_projection(&x, &b, std::slice::from_ref(&h), 20_000).unwrap();
            let oracle = case_analysis(&x, &h);
            assert!(
                p.max_abs_diff(&oracle) < 1e-8,
                "{x:?} {h:?}: {p:?} vs {oracle:?}"
            );
        }
    }

    #[test]
    fn halfspace_distance() {
        let h = Halfspace::new(v(&[0.6, 0.8]), 0.2).unwrap();
        let x = v(&[1.0, 1.0]);
        let d = distance_to_feasible(&x, |p| h.project(p));
        assert!((d - (1.4 - 0.2)).abs() < 1e-12);
        let inside = v(&[0.0, 0.0]);
        assert_eq!(distance_to_feasible(&inside, |p| h.project(p)), 0.0);
    }

    proptest! {
        #[test]
        fn idempotent_and_nonexpansive(
            x in proptest::collection::vec(-2.0f64..2.0, 2),
            y in proptest::collection::vec(-2.0f64..2.0, 2),
            theta in 0.0f64..std::f64::consts::TAU,
            off in -0.5f64..0.5,
        ) {
            let b = BoxSet::symmetric(2, 1.0).unwrap();
            let hs = [
                Halfspace::new(v(&[theta.cos(), theta.sin()]), off).unwrap(),
                Halfspace::new(v(&[1.0, -1.0]), 1.0).unwrap(),
            ];
            let (x, y) = (v(&x), v(&y));
            let px = dykstra_projection(&x, &b, &hs, 5000).unwrap();
            let py = dykstra_projection(&y, &b, &hs, 5000).unwrap();
            let ppx = dykstra_projection(&px, &b, &hs, 5000).unwrap();
            prop_assert!(ppx.max_abs_diff(&px) < 1e-8);
            prop_assert!(px.dist(&py) <= x.dist(&y) + 1e-8);
        }
    }
}
