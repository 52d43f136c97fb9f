//! Solver and verification laboratory for the parabolic quaternionic
//! Monge-Ampère flow on flat quaternionic tori `Hⁿ/ℤ⁴ⁿ`.
//!
//! ```text
//! φ_t = log det(Id + κ·Hess_H φ) − F,   φ(·, 0) = 0
//! ```
//!
//! The crate is organised bottom-up:
//!
//! - [`quat`]: quaternions, hyperhermitian matrices, ι, p, Moore determinants.
//! - [`grid`]: periodic fields on the unit torus, finite-difference and spectral
//!   derivatives, real and quaternionic Hessians, deterministic reductions.
//! - [`forms`]: a symbolic exterior-algebra oracle on ℝ⁴ⁿ that calibrates κ and
//!   checks the pointwise identities the solver relies on.
//! - [`flow`]: time integration with positivity-guarded step control.
//! - [`diagnostics`]: monotone quantities, a-priori bound monitors, residuals.
//! - [`cli`]: configuration, persistence, and the `qma` command front end.

pub mod cli;
pub mod diagnostics;
pub mod flow;
pub mod forms;
pub mod grid;
pub mod quat;
