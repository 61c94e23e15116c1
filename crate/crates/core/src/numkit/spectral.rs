use super::{Matrix, RealVec, SeededStream};
use crate::{Error, Result, Scalar};

/// Iteration budget for [`spectral_norm_power`] when callers have no better
/// choice.
pub const DEFAULT_POWER_ITERS: usize = 200;

/// Largest singular value of `m` by power iteration on `M^T M` from a random
/// unit start. Returns 0 for a zero matrix.
pub fn spectral_norm_power<T: Scalar>(
    m: &Matrix<T>,
    iters: usize,
    rng: &mut SeededStream,
) -> Result<T> {
    if iters == 0 {
        return Err(Error::InvalidInput(
            "power method needs at least one iteration".into(),
        ));
    }
    if m.is_zero() || m.cols() == 0 {
        return Ok(T::zero());
    }
    let n = m.cols();
    let mut v = RealVec::from_fn(n, |_| T::of(rng.standard_normal()));
    let norm = v.norm();
    v = v.scale(norm.recip());
    let mut sigma = T::zero();
    for _ in 0..iters {
        let mv = m.matvec_slice(v.as_slice());
        // |M v| for unit v is a lower bound on the top singular value
        sigma = sigma.max(mv.norm());
        let w = m.matvec_transposed(&mv)?;
        let wn = w.norm();
        if wn.is_zero() {
            // start landed in the null space; restart along a fixed axis
            v = RealVec::unit(n, 0);
            continue;
        }
        v = w.scale(wn.recip());
    }
    Ok(sigma.max(m.matvec_slice(v.as_slice()).norm()))
}

/// Orthonormal basis of the column space of a square matrix, by modified
/// Gram-Schmidt with one reorthogonalization pass. This yields the `Q` of a
/// thin QR factorization (up to column signs, fixed so `diag(R) > 0`).
pub fn orthonormal_basis<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>> {
    if !m.is_square() {
        return Err(Error::InvalidInput(
            "QR basis expects a square matrix".into(),
        ));
    }
    let n = m.rows();
    let mut q: Vec<RealVec<T>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut col = m.column(j);
        for _ in 0..2 {
            for prev in &q {
                let proj = prev.dot(&col);
                col.axpy(-proj, prev);
            }
        }
        let norm = col.norm();
        if !(norm > T::epsilon() * T::of(n as f64)) {
            return Err(Error::InvalidInput(format!(
                "matrix is numerically rank deficient at column {j}"
            )));
        }
        q.push(col.scale(norm.recip()));
    }
    Ok(Matrix::from_fn(n, n, |i, j| q[j][i]))
}

/// Symmetric matrix `Q diag(eigs) Q^T` with `Q` the orthogonal factor of a
/// Gaussian random matrix.
pub fn random_sym_with_spectrum<T: Scalar>(
    eigs: &[T],
    rng: &mut SeededStream,
) -> Result<Matrix<T>> {
    if eigs.is_empty() {
        return Err(Error::InvalidInput("spectrum must be nonempty".into()));
    }
    if eigs.iter().any(|e| !e.is_finite()) {
        return Err(Error::InvalidInput("spectrum must be finite".into()));
    }
    let n = eigs.len();
    let q = loop {
        let g = Matrix::from_fn(n, n, |_, _| T::of(rng.standard_normal()));
        // a singular Gaussian draw has probability zero; redraw if it happens
        if let Ok(q) = orthonormal_basis(&g) {
            break q;
        }
    };
    let scaled = Matrix::from_fn(n, n, |i, j| q.get(i, j) * eigs[j]);
    Ok(scaled.matmul(&q.transpose())?.symmetrized())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_norm() {
        let mut rng = SeededStream::new(1, 0);
        let s = spectral_norm_power(&Matrix::<f64>::identity(3), DEFAULT_POWER_ITERS, &mut rng)
            .unwrap();
        assert!((s - 1.0).abs() < 1e-9);
    }

    #[test]
    fn diagonal_norm() {
        let mut rng = SeededStream::new(2, 0);
        let m = Matrix::<f64>::from_diag(&[3.0, 1.0]);
        let s = spectral_norm_power(&m, DEFAULT_POWER_ITERS, &mut rng).unwrap();
        assert!((s - 3.0).abs() < 1e-9);
    }

    #[test]
    fn zero_matrix_norm() {
        let mut rng = SeededStream::new(2, 0);
        assert_eq!(
            spectral_norm_power(&Matrix::<f64>::zeros(2, 3), 10, &mut rng).unwrap(),
            0.0
        );
    }

    #[test]
    fn rectangular_norm() {
        // [[3,0],[4,0],[0,1]] has singular values 5 and 1
        let m =
            Matrix::<f64>::from_rows(&[vec![3.0, 0.0], vec![4.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s = spectral_norm_power(&m, 50, &mut SeededStream::new(4, 4)).unwrap();
        assert!((s - 5.0).abs() < 1e-12);
    }

    #[test]
    fn estimate_nondecreasing_in_iters() {
        let mut gen = SeededStream::new(12, 1);
        let m = Matrix::<f64>::from_fn(4, 4, |_, _| gen.standard_normal());
        let mut last = 0.0;
        for iters in [1, 2, 4, 8, 16, 64] {
            let s = spectral_norm_power(&m, iters, &mut SeededStream::new(5, 5)).unwrap();
            assert!(s >= last - 1e-15);
            last = s;
        }
    }

    #[test]
    fn equal_spectrum_gives_identity() {
        let m = random_sym_with_spectrum(&[1.0, 1.0], &mut SeededStream::new(8, 0)).unwrap();
        let id = Matrix::<f64>::identity(2);
        for (a, b) in m.as_slice().iter().zip(id.as_slice()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn trace_matches_spectrum_sum() {
        let m = random_sym_with_spectrum::<f64>(&[0.0, 2.0], &mut SeededStream::new(8, 1)).unwrap();
        assert!((m.trace() - 2.0).abs() < 1e-8);
        assert_eq!(m.asymmetry(), 0.0);
        assert!(m.is_psd(1e-10));
    }

    #[test]
    fn basis_is_orthonormal() {
        let mut rng = SeededStream::new(3, 3);
        let g = Matrix::<f64>::from_fn(6, 6, |_, _| rng.standard_normal());
        let q = orthonormal_basis(&g).unwrap();
        let qtq = q.transpose().matmul(&q).unwrap();
        let id = Matrix::<f64>::identity(6);
        for (a, b) in qtq.as_slice().iter().zip(id.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn works_in_single_precision() {
        let m = Matrix::<f32>::from_diag(&[2.0, 0.5]);
        let s = spectral_norm_power(&m, 50, &mut SeededStream::new(1, 1)).unwrap();
        assert!((s - 2.0).abs() < 1e-5);
    }

    #[test]
    fn rejects_empty_spectrum() {
        assert!(random_sym_with_spectrum::<f64>(&[], &mut SeededStream::new(0, 0)).is_err());
    }
}
