//! Cross-checks of the hand-rolled linear algebra against nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use proptest::prelude::*;
use svi_core::numkit::{
    random_sym_with_spectrum, spectral_norm_power, Matrix, RealVec, SeededStream,
};
use svi_core::problem::{GameParams, QuadraticConstraint};

fn to_na(m: &Matrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j))
}

#[test]
fn power_method_matches_svd() {
    let mut rng = SeededStream::new(11, 0);
    for n in [1usize, 2, 3, 5, 8] {
        for _ in 0..20 {
            let m = Matrix::from_fn(n, n + 1, |_, _| rng.standard_normal());
            let sigma = spectral_norm_power(&m, 2000, &mut rng).unwrap();
            let truth = to_na(&m).singular_values().max();
            assert!(
                (sigma - truth).abs() <= 1e-6 * truth,
                "n = {n}: {sigma} vs {truth}"
            );
        }
    }
}

#[test]
fn generated_spectrum_is_exact() {
    let mut rng = SeededStream::new(12, 0);
    for n in [1usize, 2, 4, 6] {
        let mut eigs: Vec<f64> = (0..n).map(|_| rng.uniform(0.0, 4.0)).collect();
        let m = random_sym_with_spectrum(&eigs, &mut rng).unwrap();
        let mut got: Vec<f64> = SymmetricEigen::new(to_na(&m))
            .eigenvalues
            .iter()
            .copied()
            .collect();
        eigs.sort_by(f64::total_cmp);
        got.sort_by(f64::total_cmp);
        for (a, b) in eigs.iter().zip(&got) {
            assert!((a - b).abs() <= 1e-8, "{eigs:?} vs {got:?}");
        }
    }
}

#[test]
fn game_payoff_norm_is_the_lipschitz_constant() {
    for seed in 0..5 {
        let g = GameParams::default()
            .generate::<f64>(&mut SeededStream::new(seed, 0))
            .unwrap();
        let truth = to_na(&g.payoff).singular_values().max();
        let l = g.spec.oracle().lipschitz();
        assert!((l - truth).abs() <= 1e-6 * truth.max(1.0), "{l} vs {truth}");
    }
}

proptest! {
    #[test]
    fn constraint_value_matches_dense_formula(
        b in proptest::collection::vec(-2.0f64..2.0, 9),
        c in proptest::collection::vec(-5.0f64..5.0, 3),
        x in proptest::collection::vec(-1.0f64..1.0, 3),
        d in -1.0f64..1.0,
    ) {
        // symmetrize so the constraint accepts it
        let raw = DMatrix::from_row_slice(3, 3, &b);
        let sym = (&raw + raw.transpose()) * 0.5;
        let psd = &sym * &sym;
        let bm = Matrix::from_fn(3, 3, |i, j| psd[(i, j)]);
        let q = QuadraticConstraint::new(bm, RealVec::new(c.clone()).unwrap(), d).unwrap();
        let xv = DVector::from_column_slice(&x);
        let truth = xv.dot(&(&psd * &xv)) + DVector::from_column_slice(&c).dot(&xv) - d;
        let got = q.value(&RealVec::new(x).unwrap()).unwrap();
        prop_assert!((got - truth).abs() <= 1e-10 * (1.0 + truth.abs()));
    }

    #[test]
    fn subgradient_bound_holds_on_the_box(
        seed in 0u64..1000,
        x in proptest::collection::vec(-1.0f64..1.0, 2),
    ) {
        let g = GameParams { num_constraints: 5, ..GameParams::default() }
            .generate::<f64>(&mut SeededStream::new(seed, 0))
            .unwrap();
        let family = g.spec.family();
        let mg = family.subgrad_bound();
        let point = RealVec::new(vec![x[0], x[1], x[1], x[0]]).unwrap();
        for m in family.members().unwrap() {
            let b = to_na(m.matrix());
            let blk = m.block();
            let y = DVector::from_column_slice(&point.as_slice()[blk]);
            let grad = (&b + b.transpose()) * &y + DVector::from_column_slice(m.linear().as_slice());
            prop_assert!(grad.norm() <= mg * (1.0 + 1e-12));
        }
    }

    #[test]
    fn mean_map_is_bounded_by_two_l_on_the_box(
        seed in 0u64..1000,
        x in proptest::collection::vec(-1.0f64..1.0, 4),
    ) {
        let g = GameParams::default()
            .generate::<f64>(&mut SeededStream::new(seed, 0))
            .unwrap();
        let l = g.spec.oracle().lipschitz();
        let f = g.spec.map_mean(&RealVec::new(x).unwrap()).unwrap();
        // |F(x)| <= L |x| <= 2L on [-1,1]^4
        prop_assert!(f.norm() <= 2.0 * l * (1.0 + 1e-6));
    }
}
