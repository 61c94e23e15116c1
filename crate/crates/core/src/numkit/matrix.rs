use super::RealVec;
use crate::{Error, Result, Scalar};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        Self::new(r, c, rows.iter().flatten().map(|&v| T::of(v)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![T::one(); n])
    }

    pub fn from_diag(diag: &[T]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn column(&self, j: usize) -> RealVec<T> {
        RealVec::from_fn(self.rows, |i| self.get(i, j))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matvec(&self, x: &RealVec<T>) -> Result<RealVec<T>> {
        Error::check_dim(self.cols, x.dim())?;
        Ok(self.matvec_slice(x.as_slice()))
    }

    pub(crate) fn matvec_slice(&self, x: &[T]) -> RealVec<T> {
        RealVec::from_fn(self.rows, |i| {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            row.iter().zip(x).map(|(&a, &b)| a * b).sum()
        })
    }

    /// `M^T x`
    pub fn matvec_transposed(&self, x: &RealVec<T>) -> Result<RealVec<T>> {
        Error::check_dim(self.rows, x.dim())?;
        let mut out = vec![T::zero(); self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            for (j, o) in out.iter_mut().enumerate() {
                *o = *o + self.get(i, j) * xi;
            }
        }
        Ok(RealVec::from_vec_unchecked(out))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        Error::check_dim(self.cols, other.rows)?;
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols)
                .map(|k| self.get(i, k) * other.get(k, j))
                .sum()
        }))
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    /// Largest `|M_ij - M_ji|`; infinite for non-square matrices.
    pub fn asymmetry(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Positive semidefiniteness test by Cholesky on `M + tol * I`.
    pub fn is_psd(&self, tol: T) -> bool {
        if !self.is_square() || self.asymmetry() > tol {
            return false;
        }
        let n = self.rows;
        let mut l = vec![T::zero(); n * n];
        for j in 0..n {
            let mut diag = self.get(j, j) + tol;
            for k in 0..j {
                diag = diag - l[j * n + k] * l[j * n + k];
            }
            if diag < T::zero() {
                return false;
            }
            let ljj = diag.sqrt();
            l[j * n + j] = ljj;
            for i in j + 1..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s = s - l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = if ljj > T::zero() { s / ljj } else { T::zero() };
            }
        }
        true
    }

    /// `(M + M^T) / 2`
    pub fn symmetrized(&self) -> Self {
        let half = T::of(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j) + self.get(j, i)) * half
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products() {
        let m =
            Matrix::<f64>::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let x = RealVec::from_f64(&[1.0, -1.0]).unwrap();
        assert_eq!(m.matvec(&x).unwrap().as_slice(), &[-1.0, -1.0, -1.0]);
        let y = RealVec::from_f64(&[1.0, 0.0, 1.0]).unwrap();
        assert_eq!(m.matvec_transposed(&y).unwrap().as_slice(), &[6.0, 8.0]);
        assert_eq!(
            m.transpose().matvec(&y).unwrap(),
            m.matvec_transposed(&y).unwrap()
        );
        let g = m.transpose().matmul(&m).unwrap();
        assert_eq!(g.as_slice(), &[35.0, 44.0, 44.0, 56.0]);
        assert!(m.matvec(&y).is_err());
    }

    #[test]
    fn psd_detection() {
        let a = Matrix::<f64>::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!(a.is_psd(1e-12));
        let b = Matrix::<f64>::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(!b.is_psd(1e-12));
        assert!(Matrix::<f64>::zeros(3, 3).is_psd(0.0));
    }
}
