//! Dense symmetric positive-definite solves in binary64 or double-double.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::numerics::DoubleDouble;

/// Lower Cholesky factor, row-major `n×n`.
pub(crate) fn cholesky(g: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = g.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = g[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(s > 0.0) {
                    return Err(Error::NotPositiveDefinite { n, pivot: i + 1 });
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Ok(l)
}

pub(crate) fn cholesky_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = l.len();
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i][k] * y[k];
        }
        y[i] = s / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    x
}

pub(crate) fn cholesky_dd(g: &[Vec<f64>]) -> Result<Vec<Vec<DoubleDouble>>> {
    let n = g.len();
    let mut l = vec![vec![DoubleDouble::ZERO; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = DoubleDouble::new(g[i][j]);
            for k in 0..j {
                s = s - l[i][k] * l[j][k];
            }
            if i == j {
                if !(s.to_f64() > 0.0) {
                    return Err(Error::NotPositiveDefinite { n, pivot: i + 1 });
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Ok(l)
}

pub(crate) fn cholesky_solve_dd(l: &[Vec<DoubleDouble>], b: &[DoubleDouble]) -> Vec<DoubleDouble> {
    let n = l.len();
    let mut y = vec![DoubleDouble::ZERO; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s = s - l[i][k] * y[k];
        }
        y[i] = s / l[i][i];
    }
    let mut x = vec![DoubleDouble::ZERO; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s = s - l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    x
}

/// `b − G x` accumulated in double-double.
pub(crate) fn residual_dd(g: &[Vec<f64>], x: &[DoubleDouble], b: &[f64]) -> Vec<DoubleDouble> {
    g.iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut s = DoubleDouble::new(bi);
            for (gij, xj) in row.iter().zip(x) {
                s = s - *xj * *gij;
            }
            s
        })
        .collect()
}

/// Extreme eigenvalues `(λ_min, λ_max)` of a symmetric matrix.
pub(crate) fn extreme_eigenvalues(g: &[Vec<f64>]) -> (f64, f64) {
    let n = g.len();
    let m = DMatrix::from_fn(n, n, |i, j| g[i][j]);
    let eig = SymmetricEigen::new(m);
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let max = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}
