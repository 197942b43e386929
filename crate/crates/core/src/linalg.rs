use crate::error::{FssError, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Eigenvalues below `EIGEN_FLOOR * trace` count as zero.
pub const EIGEN_FLOOR: f64 = 1e-12;

/// Eigenvalues below this count as zero whatever the trace; it is the
/// variance of a sample spread over about 1e-12 radians.
pub const ABSOLUTE_EIGEN_FLOOR: f64 = 1e-24;

/// Inverse of a symmetric positive definite matrix via its eigendecomposition.
pub fn symmetric_inverse(a: &DMatrix<f64>, hint: &'static str) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(a.clone());
    let trace = a.trace();
    let lmax = eig.eigenvalues.max();
    let lmin = eig.eigenvalues.min();
    if !(trace > 0.0) || lmin <= EIGEN_FLOOR * trace || lmin <= ABSOLUTE_EIGEN_FLOOR {
        return Err(FssError::Singular {
            condition: if lmin > 0.0 { lmax / lmin } else { f64::INFINITY },
            hint,
        });
    }
    let inv = DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|l| 1.0 / l));
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&inv) * eig.eigenvectors.transpose())
}

pub fn is_singular(a: &DMatrix<f64>) -> bool {
    symmetric_inverse(a, "").is_err()
}

/// `v^T A^{-1} v`.
pub fn quadratic_form_inverse(a: &DMatrix<f64>, v: &[f64], hint: &'static str) -> Result<f64> {
    let inv = symmetric_inverse(a, hint)?;
    let v = DVector::from_column_slice(v);
    Ok((v.transpose() * inv * &v)[(0, 0)])
}
