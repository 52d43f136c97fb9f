//! Quaternion and hyperhermitian matrix algebra: Hamilton products, the real
//! representation ι, the projection p, Moore determinants and spectra.

mod eigen;
mod matrix;
mod quaternion;
mod structure;

pub use eigen::{symmetric_eigen, symmetric_eigenvalues};
pub use matrix::{
    hh_eigenvalues, hh_inverse, iota, iota_inverse, is_positive_definite, moore_det,
    re_trace_product, HyperhermitianMatrix, QuatMatrix, HYPERHERMITIAN_TOL,
};
pub(crate) use matrix::IOTA_BLOCKS;
pub use quaternion::{quat_mul, Quaternion};
pub use structure::{p_project, StructureMatrices};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not hyperhermitian (defect {defect:e})")]
    NotHyperhermitian { defect: f64 },
    #[error("spectrum of ι(U) does not split into quadruples (spread {spread:e} > {tolerance:e})")]
    DegenerateSpectrum { spread: f64, tolerance: f64 },
    #[error("matrix is singular (min |eigenvalue| = {min_abs_eigenvalue:e})")]
    SingularMatrix { min_abs_eigenvalue: f64 },
}

/// Closed-form spectral data for hyperhermitian matrices of size 1 and 2.
///
/// For `[[a, q], [q̄, b]]` the quaternionic eigenvalues are
/// `(a+b)/2 ± √(((a−b)/2)² + |q|²)` and the Moore determinant is `ab − |q|²`.
/// Used on hot paths where the general ι-spectrum route is too slow.
pub mod small {
    use super::Quaternion;

    /// `(min eigenvalue, Moore determinant)` of the packed matrix
    /// `diag = [a]` or `diag = [a, b]`, `upper = [q]`.
    #[inline]
    pub fn min_eig_and_det(diag: &[f64], upper: &[Quaternion]) -> (f64, f64) {
        match diag.len() {
            1 => (diag[0], diag[0]),
            2 => {
                let (a, b) = (diag[0], diag[1]);
                let q2 = upper[0].norm_sqr();
                let half = 0.5 * (a - b);
                let root = (half * half + q2).sqrt();
                (0.5 * (a + b) - root, a * b - q2)
            }
            n => panic!("closed form only for n <= 2, got {n}"),
        }
    }

    /// Inverse of the packed matrix, same packing.
    #[inline]
    pub fn inverse(diag: &[f64], upper: &[Quaternion]) -> (Vec<f64>, Vec<Quaternion>) {
        match diag.len() {
            1 => (vec![1.0 / diag[0]], vec![]),
            2 => {
                let (a, b) = (diag[0], diag[1]);
                let det = a * b - upper[0].norm_sqr();
                (vec![b / det, a / det], vec![upper[0].scale(-1.0 / det)])
            }
            n => panic!("closed form only for n <= 2, got {n}"),
        }
    }
}
