use super::{AffineMap, ConstraintFamily, MappingOracle, ProblemSpec, QuadraticConstraint};
use crate::numkit::{random_sym_with_spectrum, BoxSet, Matrix, RealVec, SeededStream};
use crate::{Error, Result, Scalar};

/// Parameters of the constrained two-player zero-sum matrix game.
///
/// The payoff `A = Q diag(λ) Q^T` has `λ_i ~ U[payoff_spectrum]`. Each of the
/// `num_constraints` quadratics `y^T B_i y + c_i^T y - d_i <= 0` has
/// `B_i` with spectrum drawn from `constraint_spectrum`, `c_i` uniform per
/// coordinate in `linear_range` and `d_i` uniform in `offset_range`, and is
/// imposed on both players' blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct GameParams {
    pub player_dim: usize,
    pub num_constraints: usize,
    pub payoff_spectrum: (f64, f64),
    pub constraint_spectrum: (f64, f64),
    pub linear_range: (f64, f64),
    pub offset_range: (f64, f64),
    pub noise_stddev: f64,
    pub box_radius: f64,
}

impl Default for GameParams {
    fn default() -> Self {
        Self {
            player_dim: 2,
            num_constraints: 1000,
            payoff_spectrum: (0.0, 4.0),
            constraint_spectrum: (0.0, 2.0),
            linear_range: (-10.0, -5.0),
            offset_range: (-1.0, 0.0),
            noise_stddev: 0.5,
            box_radius: 1.0,
        }
    }
}

/// A generated game: payoff matrix plus the assembled problem.
#[derive(Clone, Debug)]
pub struct GameInstance<T> {
    pub payoff: Matrix<T>,
    pub spec: ProblemSpec<T>,
}

impl GameParams {
    pub fn validate(&self) -> Result<()> {
        let ordered = |name: &str, (lo, hi): (f64, f64)| {
            if lo.is_finite() && hi.is_finite() && lo <= hi {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!(
                    "{name} range [{lo}, {hi}] is not ordered"
                )))
            }
        };
        if self.player_dim == 0 {
            return Err(Error::InvalidInput("player dimension must be >= 1".into()));
        }
        ordered("payoff spectrum", self.payoff_spectrum)?;
        ordered("constraint spectrum", self.constraint_spectrum)?;
        ordered("linear term", self.linear_range)?;
        ordered("offset", self.offset_range)?;
        if self.constraint_spectrum.0 < 0.0 {
            return Err(Error::InvalidInput(
                "constraint spectrum must be nonnegative".into(),
            ));
        }
        if !(self.noise_stddev >= 0.0) {
            return Err(Error::InvalidInput(
                "noise standard deviation must be >= 0".into(),
            ));
        }
        if !(self.box_radius > 0.0) {
            return Err(Error::InvalidInput("box radius must be > 0".into()));
        }
        Ok(())
    }

    pub fn generate<T: Scalar>(&self, rng: &mut SeededStream) -> Result<GameInstance<T>> {
        self.validate()?;
        let n = self.player_dim;
        let uniform = |rng: &mut SeededStream, (lo, hi): (f64, f64)| T::of(rng.uniform(lo, hi));

        let mut payoff_rng = rng.fork(1);
        let eigs: Vec<T> = (0..n)
            .map(|_| uniform(&mut payoff_rng, self.payoff_spectrum))
            .collect();
        let payoff = random_sym_with_spectrum(&eigs, &mut payoff_rng)?;

        // [[0, A], [-A^T, 0]]
        let joint = Matrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
            (true, false) => payoff.get(i, j - n),
            (false, true) => -payoff.get(j, i - n),
            _ => T::zero(),
        });
        let oracle = MappingOracle::affine(AffineMap::linear(joint)?, T::of(self.noise_stddev))?;
        let base = BoxSet::symmetric(2 * n, T::of(self.box_radius))?;

        let mut cons_rng = rng.fork(2);
        let mut shared = Vec::with_capacity(self.num_constraints);
        for _ in 0..self.num_constraints {
            let spectrum: Vec<T> = (0..n)
                .map(|_| uniform(&mut cons_rng, self.constraint_spectrum))
                .collect();
            let b = random_sym_with_spectrum(&spectrum, &mut cons_rng)?;
            let c = RealVec::from_fn(n, |_| uniform(&mut cons_rng, self.linear_range));
            let d = uniform(&mut cons_rng, self.offset_range);
            shared.push(QuadraticConstraint::new(b, c, d)?);
        }
        let mut members = Vec::with_capacity(2 * self.num_constraints);
        for offset in [0, n] {
            for q in &shared {
                members.push(q.clone().on_block(offset, 2 * n)?);
            }
        }
        // one sampled index imposes constraint i on both players
        let family = ConstraintFamily::finite_grouped(members, 2, &base)?;
        let spec = ProblemSpec::new(oracle, base, family)?.with_blocks(vec![0..n, n..2 * n])?;
        Ok(GameInstance { payoff, spec })
    }
}

/// Zero-sum game with default parameters, `n` coordinates per player and
/// `num_constraints` constraints per player.
pub fn make_zero_sum_game<T: Scalar>(
    n: usize,
    num_constraints: usize,
    rng: &mut SeededStream,
) -> Result<ProblemSpec<T>> {
    let params = GameParams {
        player_dim: n,
        num_constraints,
        ..GameParams::default()
    };
    Ok(params.generate(rng)?.spec)
}
