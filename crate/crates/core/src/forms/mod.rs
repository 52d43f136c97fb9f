//! Symbolic exterior algebra on ℝ⁴ⁿ (`n ≤ 2`) with polynomial coefficients.
//!
//! Used as an independent oracle: it computes κ and `c_grad`, and checks the
//! wedge-power identities the flow relies on by brute-force expansion.

mod form;
mod oracle;
mod poly;

pub use form::PolyForm;
pub use oracle::{
    calibrate_kappa, matrix_to_form, metric_from_form, potential_of, q_real_defect, quat_hessian_of_quadratic,
    random_hyperhermitian, random_positive, real_metric, verify_delta_logdet, verify_formule, verify_lucio,
    wedge_ratio, wedge_ratio_derivative, CalibrationReport, DeltaLogdetResidual, PolyHyperhermitian,
    KAPPA_AGREEMENT_TOL, Q_REAL_TOL,
};
pub use poly::{Monomial, Poly, MAX_VARS};

use thiserror::Error;

use crate::quat::LinalgError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormError {
    #[error("form is not q-real of type (2,0) (defect {defect:e})")]
    NotQReal { defect: f64 },
    #[error("κ routes disagree (κ = {kappa}, gap {gap:e})")]
    CalibrationMismatch { kappa: f64, gap: f64 },
    #[error("G is not positive definite")]
    SingularG,
    #[error("U(p) is not diagonal (off-diagonal {off_diagonal:e})")]
    NotDiagonalAtP { off_diagonal: f64 },
    #[error("U(p) is not positive (diagonal entry {min_eigenvalue})")]
    NotPositive { min_eigenvalue: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
