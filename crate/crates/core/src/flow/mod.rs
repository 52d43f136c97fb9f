//! Explicit time stepping of `φ_t = log det(Id + κ·Hess_H φ) − F`, `φ(0) = 0`,
//! with step halving whenever `Id + κ·Hess_H φ` loses positivity.

pub mod checkpoint;
mod engine;
mod run;

pub use engine::{
    forcing_field, normalize, Evaluation, FMode, FlowConfig, FlowEngine, FlowState, StepReport, Stepper,
    GROWTH_FACTOR, GROWTH_STREAK, MAX_HALVINGS,
};
pub use run::{run, Observer, RunOptions, RunOutcome};

use thiserror::Error;

use crate::grid::GridError;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("positivity lost at point {index} {coords:?}: min eigenvalue {min_eigenvalue:e}")]
    PositivityLost { index: usize, coords: Vec<usize>, min_eigenvalue: f64 },
    #[error("step {step} failed after halving dt to {dt:e}: point {index} {coords:?}, min eigenvalue {min_eigenvalue:e}")]
    StepFailure { step: u64, dt: f64, index: usize, coords: Vec<usize>, min_eigenvalue: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("observer: {0}")]
    Observer(String),
}
