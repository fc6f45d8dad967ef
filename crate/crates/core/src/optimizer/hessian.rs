//! Central-difference Hessians and the standard errors they imply.

use crate::linalg::{spd_inverse, Matrix};
use crate::scalar::Scalar;

fn step<T: Scalar>(x: T) -> T {
    T::lit(1e-5).max(T::lit(1e-5) * x.abs())
}

/// Hessian of `f` at `x` by central differences with steps `max(1e-5, 1e-5 |x_i|)`.
pub fn numerical_hessian<T: Scalar, F: FnMut(&[T]) -> T>(mut f: F, x: &[T]) -> Matrix<T> {
    let n = x.len();
    let h: Vec<T> = x.iter().map(|v| step(*v)).collect();
    let f0 = f(x);
    let mut at = x.to_vec();
    let mut eval = |shifts: &[(usize, T)], at: &mut Vec<T>| {
        at.copy_from_slice(x);
        for &(i, d) in shifts {
            at[i] += d;
        }
        f(at)
    };
    let mut hess = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        let fp = eval(&[(i, h[i])], &mut at);
        let fm = eval(&[(i, -h[i])], &mut at);
        hess[i][i] = (fp - T::lit(2.0) * f0 + fm) / (h[i] * h[i]);
        for j in 0..i {
            let fpp = eval(&[(i, h[i]), (j, h[j])], &mut at);
            let fpm = eval(&[(i, h[i]), (j, -h[j])], &mut at);
            let fmp = eval(&[(i, -h[i]), (j, h[j])], &mut at);
            let fmm = eval(&[(i, -h[i]), (j, -h[j])], &mut at);
            let v = (fpp - fpm - fmp + fmm) / (T::lit(4.0) * h[i] * h[j]);
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    hess
}

/// Inverse of a (negative log-likelihood) Hessian, tolerating flat directions.
///
/// Coordinates whose curvature is negligible are marked unavailable and the
/// remaining block is inverted; if that block is not positive definite every
/// coordinate is unavailable.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariance<T = f64> {
    /// `true` where the coordinate has a usable variance.
    pub available: Vec<bool>,
    /// Full-size matrix; rows and columns of unavailable coordinates are zero.
    pub matrix: Matrix<T>,
}

pub fn covariance_from_hessian<T: Scalar>(hess: &Matrix<T>) -> Covariance<T> {
    let n = hess.len();
    let scale = hess
        .iter()
        .enumerate()
        .fold(T::zero(), |m, (i, r)| if r[i].is_finite() { m.max(r[i].abs()) } else { m });
    let flat_tol = scale * T::lit(1e-10);
    let keep: Vec<usize> = (0..n)
        .filter(|&i| hess[i][i].is_finite() && hess[i][i].abs() > flat_tol)
        .collect();
    let sub: Matrix<T> = keep
        .iter()
        .map(|&i| keep.iter().map(|&j| hess[i][j]).collect())
        .collect();
    let mut available = vec![false; n];
    let mut matrix = vec![vec![T::zero(); n]; n];
    if let Some(inv) = spd_inverse(&sub) {
        for (a, &i) in keep.iter().enumerate() {
            available[i] = true;
            for (b, &j) in keep.iter().enumerate() {
                matrix[i][j] = inv[a][b];
            }
        }
    }
    Covariance { available, matrix }
}

/// Standard errors and z-statistics of a minimizer `at` of the negative
/// log-likelihood `objective`, in the objective's own coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ZStats<T = f64> {
    pub std_errors: Vec<Option<T>>,
    pub z: Vec<Option<T>>,
}

pub fn zstats<T: Scalar, F: FnMut(&[T]) -> T>(objective: F, at: &[T]) -> ZStats<T> {
    let cov = covariance_from_hessian(&numerical_hessian(objective, at));
    let std_errors: Vec<Option<T>> = (0..at.len())
        .map(|i| {
            let v = cov.matrix[i][i];
            (cov.available[i] && v > T::zero()).then(|| v.sqrt())
        })
        .collect();
    let z = at
        .iter()
        .zip(&std_errors)
        .map(|(x, se)| se.map(|s| *x / s))
        .collect();
    ZStats { std_errors, z }
}
