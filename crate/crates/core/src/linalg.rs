//! Small dense kernels: Householder QR for least squares, Cholesky for
//! symmetric positive-definite inverses. Matrices are row-major `Vec<Vec<T>>`.

use crate::scalar::Scalar;

pub type Matrix<T> = Vec<Vec<T>>;

/// Thin QR factorization of an `n x k` design (n >= k) by Householder reflections.
#[derive(Debug, Clone)]
pub struct Qr<T> {
    // Householder vectors below the diagonal, R on and above it.
    qr: Matrix<T>,
    rdiag: Vec<T>,
    n: usize,
    k: usize,
}

impl<T: Scalar> Qr<T> {
    pub fn new(a: &Matrix<T>) -> Self {
        let n = a.len();
        let k = if n == 0 { 0 } else { a[0].len() };
        let mut qr = a.clone();
        let mut rdiag = vec![T::zero(); k];
        for j in 0..k {
            let norm = (j..n).fold(T::zero(), |acc, i| acc.hypot(qr[i][j]));
            if norm.is_zero() {
                rdiag[j] = T::zero();
                continue;
            }
            let norm = if qr[j][j] < T::zero() { -norm } else { norm };
            for row in qr.iter_mut().skip(j) {
                row[j] /= norm;
            }
            qr[j][j] += T::one();
            for c in (j + 1)..k {
                let s = (j..n).fold(T::zero(), |acc, i| acc + qr[i][j] * qr[i][c]);
                let s = -s / qr[j][j];
                for row in qr.iter_mut().skip(j) {
                    let v = row[j];
                    row[c] += s * v;
                }
            }
            rdiag[j] = -norm;
        }
        Self { qr, rdiag, n, k }
    }

    /// Index of the first column whose diagonal of R is negligible relative to
    /// the largest, i.e. a column lying in the span of earlier columns.
    pub fn first_dependent_column(&self, rel_tol: T) -> Option<usize> {
        let scale = self
            .rdiag
            .iter()
            .fold(T::zero(), |m, r| m.max(r.abs()));
        if scale.is_zero() {
            return if self.k > 0 { Some(0) } else { None };
        }
        self.rdiag.iter().position(|r| r.abs() <= rel_tol * scale)
    }

    /// Least-squares solution of `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut y = b.to_vec();
        for j in 0..self.k {
            let s = (j..self.n).fold(T::zero(), |acc, i| acc + self.qr[i][j] * y[i]);
            let s = -s / self.qr[j][j];
            for (i, yi) in y.iter_mut().enumerate().skip(j) {
                *yi += s * self.qr[i][j];
            }
        }
        let mut x = vec![T::zero(); self.k];
        for j in (0..self.k).rev() {
            let mut v = y[j];
            for c in (j + 1)..self.k {
                v -= self.r(j, c) * x[c];
            }
            x[j] = v / self.rdiag[j];
        }
        x
    }

    fn r(&self, i: usize, j: usize) -> T {
        if i == j {
            self.rdiag[i]
        } else if i < j {
            self.qr[i][j]
        } else {
            T::zero()
        }
    }

    /// `(A^T A)^{-1} = R^{-1} R^{-T}`.
    pub fn inverse_gram(&self) -> Matrix<T> {
        let k = self.k;
        // R^{-1}, upper triangular
        let mut rinv = vec![vec![T::zero(); k]; k];
        for j in 0..k {
            rinv[j][j] = T::one() / self.rdiag[j];
            for i in (0..j).rev() {
                let mut s = T::zero();
                for m in (i + 1)..=j {
                    s += self.r(i, m) * rinv[m][j];
                }
                rinv[i][j] = -s / self.rdiag[i];
            }
        }
        let mut out = vec![vec![T::zero(); k]; k];
        for i in 0..k {
            for j in i..k {
                let mut s = T::zero();
                for m in j..k {
                    s += rinv[i][m] * rinv[j][m];
                }
                out[i][j] = s;
                out[j][i] = s;
            }
        }
        out
    }
}

/// Cholesky factor `L` with `A = L L^T`; `None` if `A` is not positive definite.
pub fn cholesky<T: Scalar>(a: &Matrix<T>) -> Option<Matrix<T>> {
    let n = a.len();
    let mut l = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j];
            for m in 0..j {
                s -= l[i][m] * l[j][m];
            }
            if i == j {
                if !(s > T::zero()) || !s.is_finite() {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

/// Inverse of a symmetric positive-definite matrix via Cholesky.
pub fn spd_inverse<T: Scalar>(a: &Matrix<T>) -> Option<Matrix<T>> {
    let l = cholesky(a)?;
    let n = a.len();
    let mut inv = vec![vec![T::zero(); n]; n];
    for c in 0..n {
        // solve L y = e_c, then L^T x = y
        let mut y = vec![T::zero(); n];
        for i in 0..n {
            let mut s = if i == c { T::one() } else { T::zero() };
            for m in 0..i {
                s -= l[i][m] * y[m];
            }
            y[i] = s / l[i][i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for m in (i + 1)..n {
                s -= l[m][i] * inv[m][c];
            }
            inv[i][c] = s / l[i][i];
        }
    }
    Some(inv)
}
