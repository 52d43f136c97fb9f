//! Periodic grids on the unit torus `[0,1)^{4n}` and the calculus on them.

mod calculus;
mod field;
pub mod io;
mod reduce;
mod spectral;

pub use calculus::{
    gradient, packed_width, partial, quat_hessian, quat_laplacian, real_hessian, unpack, DerivativeMode,
    HyperhermitianField, RealHessianField,
};
pub(crate) use calculus::CONJ_UNIT_PRODUCTS;
pub use field::{GridShape, PeriodicScalarField};
pub use reduce::{mean, pairwise_sum, weighted_integral};
pub use spectral::spectral_partial;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("quaternionic dimension {0} is not supported (n must be 1 or 2)")]
    UnsupportedDimension(usize),
    #[error("grid with {points} points per axis is too small (need at least {min})")]
    GridTooSmall { points: usize, min: usize },
    #[error("expected {expected} values, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("axis {axis} out of range for {dims} dimensions")]
    AxisOutOfRange { axis: usize, dims: usize },
    #[error("derivative order {0} not supported")]
    InvalidOrder(u32),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("snapshot format: {0}")]
    Format(String),
}
