use serde::{Deserialize, Serialize};

use super::FlowError;
use crate::grid::{mean, quat_hessian, DerivativeMode, GridError, GridShape, HyperhermitianField, PeriodicScalarField};
use crate::quat::{small, Quaternion};

pub const MAX_HALVINGS: u32 = 20;
pub const GROWTH_STREAK: u32 = 10;
pub const GROWTH_FACTOR: f64 = 1.2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stepper {
    #[default]
    Heun,
    Rk4,
}

/// One cosine mode `amplitude·cos(2π⟨wave, x⟩)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FMode {
    pub wave: Vec<i64>,
    pub amplitude: f64,
}

/// Samples a finite cosine sum on the grid.
pub fn forcing_field(shape: &GridShape, modes: &[FMode]) -> PeriodicScalarField {
    let two_pi = 2.0 * std::f64::consts::PI;
    PeriodicScalarField::from_fn(shape, |x| {
        modes
            .iter()
            .map(|m| {
                let phase: f64 = m.wave.iter().zip(x).map(|(&k, &xi)| k as f64 * xi).sum();
                m.amplitude * (two_pi * phase).cos()
            })
            .sum()
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowConfig {
    pub n: usize,
    pub points: usize,
    pub kappa: f64,
    pub sigma: f64,
    pub eps_pos: f64,
    pub tol_conv: f64,
    pub max_steps: u64,
    pub stepper: Stepper,
    pub mode: DerivativeMode,
}

impl FlowConfig {
    pub fn new(n: usize, points: usize, kappa: f64) -> Self {
        Self {
            n,
            points,
            kappa,
            sigma: 0.2,
            eps_pos: 1e-6,
            tol_conv: 1e-8,
            max_steps: 100_000,
            stepper: Stepper::Heun,
            mode: DerivativeMode::Fd4,
        }
    }

    pub fn shape(&self) -> Result<GridShape, FlowError> {
        Ok(GridShape::new(self.n, self.points)?)
    }

    /// `σ·h²/(4n·κ)`.
    pub fn dt0(&self) -> f64 {
        let h = 1.0 / self.points as f64;
        self.sigma * h * h / (4.0 * self.n as f64 * self.kappa)
    }
}

/// Everything the flow and the diagnostics need at one `φ`.
#[derive(Clone, Debug)]
pub struct Evaluation {
    /// `φ_t = log det(Id + κ·Hess_H φ) − F`.
    pub rhs: PeriodicScalarField,
    /// `det(Id + κ·Hess_H φ)`.
    pub density: PeriodicScalarField,
    /// Smallest eigenvalue of `Id + κ·Hess_H φ`.
    pub min_eig: PeriodicScalarField,
    /// `Hess_H φ`.
    pub hessian: HyperhermitianField,
}

#[derive(Clone, Debug)]
pub struct FlowState {
    pub phi: PeriodicScalarField,
    pub forcing: PeriodicScalarField,
    pub t: f64,
    pub step: u64,
    pub dt: f64,
    /// Accepted steps since the last change of `dt`.
    pub streak: u32,
}

impl FlowState {
    /// `φ = 0` at `t = 0`.
    pub fn initial(config: &FlowConfig, forcing: PeriodicScalarField) -> Self {
        Self { phi: PeriodicScalarField::zeros(forcing.shape()), forcing, t: 0.0, step: 0, dt: config.dt0(), streak: 0 }
    }
}

/// What one accepted step did.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepReport {
    pub dt_used: f64,
    pub halvings: u32,
}

pub struct FlowEngine {
    config: FlowConfig,
    shape: GridShape,
}

impl FlowEngine {
    pub fn new(config: FlowConfig) -> Result<Self, FlowError> {
        if !(config.sigma > 0.0 && config.sigma < 1.0) {
            return Err(FlowError::InvalidConfig(format!("sigma = {} must lie in (0, 1)", config.sigma)));
        }
        if !(config.tol_conv > 0.0) || !(config.kappa > 0.0) || !(config.eps_pos >= 0.0) {
            return Err(FlowError::InvalidConfig("tol_conv and kappa must be positive, eps_pos nonnegative".into()));
        }
        let shape = config.shape()?;
        if config.mode == DerivativeMode::Fd4 && config.points < 5 {
            return Err(GridError::GridTooSmall { points: config.points, min: 5 }.into());
        }
        Ok(Self { config, shape })
    }

    pub fn config(&self) -> &FlowConfig {
        &self.config
    }

    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    /// Pointwise evaluation of the right-hand side at `phi`.
    pub fn evaluate(&self, phi: &PeriodicScalarField, forcing: &PeriodicScalarField) -> Result<Evaluation, FlowError> {
        let n = self.config.n;
        let kappa = self.config.kappa;
        let hessian = quat_hessian(phi, self.config.mode)?;
        let f = forcing.values();
        let packed = self.shape.map_points(3, |index, _, out| {
            let p = hessian.packed(index);
            let mut diag = [0.0; 2];
            for (d, &h) in diag.iter_mut().zip(&p[..n]) {
                *d = 1.0 + kappa * h;
            }
            let mut upper = [Quaternion::ZERO; 1];
            if n == 2 {
                upper[0] = Quaternion::new(p[2], p[3], p[4], p[5]).scale(kappa);
            }
            let (min_eig, det) = small::min_eig_and_det(&diag[..n], &upper[..n - 1]);
            out[0] = det.ln() - f[index];
            out[1] = det;
            out[2] = min_eig;
        });
        let column = |k: usize| {
            let v = packed.chunks_exact(3).map(|c| c[k]).collect();
            PeriodicScalarField::from_values(&self.shape, v).expect("grid length")
        };
        let min_eig = column(2);
        if let Some((index, &value)) =
            min_eig.values().iter().enumerate().find(|(_, &m)| !(m > self.config.eps_pos))
        {
            return Err(FlowError::PositivityLost { index, coords: self.shape.coords(index), min_eigenvalue: value });
        }
        Ok(Evaluation { rhs: column(0), density: column(1), min_eig, hessian })
    }

    /// `log det(Id + κ·Hess_H φ) − F`.
    pub fn rhs(&self, state: &FlowState) -> Result<PeriodicScalarField, FlowError> {
        Ok(self.evaluate(&state.phi, &state.forcing)?.rhs)
    }

    fn axpy(base: &PeriodicScalarField, terms: &[(f64, &PeriodicScalarField)]) -> PeriodicScalarField {
        let mut v = base.values().to_vec();
        for (i, x) in v.iter_mut().enumerate() {
            let mut inc = 0.0;
            for (c, k) in terms {
                inc += c * k.values()[i];
            }
            *x += inc;
        }
        PeriodicScalarField::from_values(base.shape(), v).expect("grid length")
    }

    /// Trial update with step `dt`, returning the new `φ` and its evaluation.
    fn attempt(&self, state: &FlowState, k1: &Evaluation, dt: f64) -> Result<(PeriodicScalarField, Evaluation), FlowError> {
        let phi = &state.phi;
        let f = &state.forcing;
        let next = match self.config.stepper {
            Stepper::Heun => {
                let k2 = self.evaluate(&Self::axpy(phi, &[(dt, &k1.rhs)]), f)?.rhs;
                Self::axpy(phi, &[(0.5 * dt, &k1.rhs), (0.5 * dt, &k2)])
            }
            Stepper::Rk4 => {
                let k2 = self.evaluate(&Self::axpy(phi, &[(0.5 * dt, &k1.rhs)]), f)?.rhs;
                let k3 = self.evaluate(&Self::axpy(phi, &[(0.5 * dt, &k2)]), f)?.rhs;
                let k4 = self.evaluate(&Self::axpy(phi, &[(dt, &k3)]), f)?.rhs;
                Self::axpy(
                    phi,
                    &[(dt / 6.0, &k1.rhs), (dt / 3.0, &k2), (dt / 3.0, &k3), (dt / 6.0, &k4)],
                )
            }
        };
        let eval = self.evaluate(&next, f)?;
        Ok((next, eval))
    }

    /// One accepted step. `current` is the evaluation at `state.phi`; on success
    /// it is replaced by the evaluation at the new `φ`.
    pub fn step(&self, state: &mut FlowState, current: &mut Evaluation) -> Result<StepReport, FlowError> {
        let mut dt = state.dt;
        let mut halvings = 0;
        loop {
            match self.attempt(state, current, dt) {
                Ok((phi, eval)) => {
                    state.phi = phi;
                    state.t += dt;
                    state.step += 1;
                    *current = eval;
                    if halvings > 0 {
                        state.dt = dt;
                        state.streak = 0;
                    } else {
                        state.streak += 1;
                        if state.streak >= GROWTH_STREAK {
                            state.dt = (GROWTH_FACTOR * dt).min(self.config.dt0());
                            state.streak = 0;
                        }
                    }
                    return Ok(StepReport { dt_used: dt, halvings });
                }
                Err(FlowError::PositivityLost { index, coords, min_eigenvalue }) => {
                    if halvings == MAX_HALVINGS {
                        return Err(FlowError::StepFailure { step: state.step, dt, index, coords, min_eigenvalue });
                    }
                    halvings += 1;
                    dt *= 0.5;
                }
                Err(e) => return Err(e),
            }
        }
    }
}

/// `φ − mean(φ)`.
pub fn normalize(phi: &PeriodicScalarField) -> PeriodicScalarField {
    let m = mean(phi);
    phi.map(|v| v - m)
}
