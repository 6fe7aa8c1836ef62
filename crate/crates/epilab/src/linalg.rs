//! Small dense symmetric-matrix helpers (dimensions 1..=3 in practice).
//!
//! Matrices are row-major `Vec<Vec<f64>>` to keep the serialized form plain;
//! nalgebra is used where eigen-decompositions are needed.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

pub fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

pub fn scaled_identity(n: usize, s: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { s } else { 0.0 }).collect())
        .collect()
}

pub fn to_na(m: &[Vec<f64>]) -> DMatrix<f64> {
    let r = m.len();
    let c = if r == 0 { 0 } else { m[0].len() };
    DMatrix::from_fn(r, c, |i, j| m[i][j])
}

pub fn from_na(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn is_square(m: &[Vec<f64>]) -> bool {
    let n = m.len();
    m.iter().all(|row| row.len() == n)
}

pub fn is_symmetric(m: &[Vec<f64>], tol: f64) -> bool {
    if !is_square(m) {
        return false;
    }
    let n = m.len();
    (0..n).all(|i| (0..n).all(|j| (m[i][j] - m[j][i]).abs() <= tol))
}

pub fn mat_vec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (r, k, c) = (a.len(), b.len(), b[0].len());
    (0..r)
        .map(|i| {
            (0..c)
                .map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum())
                .collect()
        })
        .collect()
}

pub fn transpose(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (r, c) = (m.len(), m[0].len());
    (0..c).map(|j| (0..r).map(|i| m[i][j]).collect()).collect()
}

pub fn mat_add(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn mat_scale(a: &[Vec<f64>], s: f64) -> Vec<Vec<f64>> {
    a.iter()
        .map(|row| row.iter().map(|x| x * s).collect())
        .collect()
}

pub fn quad_form(m: &[Vec<f64>], x: &[f64]) -> f64 {
    mat_vec(m, x).iter().zip(x).map(|(a, b)| a * b).sum()
}

pub fn trace(m: &[Vec<f64>]) -> f64 {
    (0..m.len()).map(|i| m[i][i]).sum()
}

pub fn frobenius(m: &[Vec<f64>]) -> f64 {
    m.iter()
        .flat_map(|r| r.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}

/// Determinant via LU (nalgebra), fine for the small sizes used here.
pub fn det(m: &[Vec<f64>]) -> f64 {
    to_na(m).determinant()
}

/// Inverse of a square matrix; error if singular.
pub fn inverse(m: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    to_na(m)
        .try_inverse()
        .map(|inv| from_na(&inv))
        .ok_or_else(|| Error::RankDeficient("matrix inversion failed".into()))
}

/// Lower Cholesky factor of a symmetric positive-definite matrix.
pub fn cholesky(m: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    nalgebra::Cholesky::new(to_na(m))
        .map(|c| from_na(&c.l()))
        .ok_or_else(|| Error::RankDeficient("Cholesky failed: matrix not positive definite".into()))
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues(m: &[Vec<f64>]) -> Vec<f64> {
    let mut ev: Vec<f64> = to_na(m).symmetric_eigen().eigenvalues.iter().cloned().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

pub fn min_eigenvalue(m: &[Vec<f64>]) -> f64 {
    sym_eigenvalues(m)
        .first()
        .cloned()
        .unwrap_or(f64::NAN)
}

/// Project a symmetric matrix onto the PSD cone (clip negative eigenvalues).
pub fn psd_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    let se = m.clone().symmetric_eigen();
    let vals = se.eigenvalues.map(|v| v.max(0.0));
    &se.eigenvectors * DMatrix::from_diagonal(&DVector::from(vals)) * se.eigenvectors.transpose()
}

/// Symmetrize (A + A^T)/2 to wash out round-off drift in iterations.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Check that `cov` is a valid covariance of dimension n (symmetric PD).
pub fn validate_cov(cov: &[Vec<f64>], n: usize) -> Result<()> {
    if cov.len() != n || cov.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: cov.len(),
        });
    }
    if !is_symmetric(cov, 1e-10) {
        return Err(Error::InvalidSpec("covariance must be symmetric".into()));
    }
    if min_eigenvalue(cov) <= 0.0 {
        return Err(Error::InvalidSpec(
            "covariance must be positive definite".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn inverse_and_det_2x2() {
        let m = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        assert_relative_eq!(det(&m), 3.0, max_relative = 1e-12);
        let inv = inverse(&m).unwrap();
        let prod = mat_mul(&m, &inv);
        assert_relative_eq!(prod[0][0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(prod[0][1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn cholesky_reconstructs() {
        let m = vec![
            vec![4.0, 2.0, 0.5],
            vec![2.0, 3.0, 0.2],
            vec![0.5, 0.2, 1.0],
        ];
        let l = cholesky(&m).unwrap();
        let back = mat_mul(&l, &transpose(&l));
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(back[i][j], m[i][j], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let m = vec![vec![3.0, 0.0], vec![0.0, 1.0]];
        let ev = sym_eigenvalues(&m);
        assert_relative_eq!(ev[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(ev[1], 3.0, epsilon = 1e-12);
    }
}
