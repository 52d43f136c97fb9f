use super::{Evaluation, FlowEngine, FlowError, FlowState, StepReport};
use crate::diagnostics::{compute_b, fill_f_fd, record, DiagnosticsContext, DiagnosticsRecord};

/// Hooks called by [`run`]. All methods default to doing nothing.
pub trait Observer {
    /// After a record is appended; `records` is the full series so far.
    fn on_record(&mut self, _state: &FlowState, _eval: &Evaluation, _records: &[DiagnosticsRecord]) -> Result<(), FlowError> {
        Ok(())
    }

    /// After every accepted step.
    fn on_step(&mut self, _state: &FlowState, _eval: &Evaluation, _report: &StepReport) -> Result<(), FlowError> {
        Ok(())
    }

    /// When the run stops at `halt_at_step` before finishing.
    fn on_halt(&mut self, _state: &FlowState, _records: &[DiagnosticsRecord]) -> Result<(), FlowError> {
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    /// Record diagnostics every `cadence` steps (and at the end).
    pub cadence: u64,
    pub c_grad: f64,
    /// Stop early at this step, as if interrupted.
    pub halt_at_step: Option<u64>,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub state: FlowState,
    pub eval: Evaluation,
    pub records: Vec<DiagnosticsRecord>,
    pub converged: bool,
    pub halted: bool,
}

/// Steps until `osc(φ_t) < tol_conv` or `max_steps`.
///
/// `records` holds diagnostics from an earlier part of the same run (when
/// resuming); rows at or after the current step are discarded and recomputed.
pub fn run(
    engine: &FlowEngine,
    mut state: FlowState,
    mut records: Vec<DiagnosticsRecord>,
    options: RunOptions,
    observers: &mut [&mut dyn Observer],
) -> Result<RunOutcome, FlowError> {
    let config = engine.config();
    let cadence = options.cadence.max(1);
    let ctx = DiagnosticsContext { kappa: config.kappa, c_grad: options.c_grad, mode: config.mode, b: compute_b(&state.forcing) };
    let mut eval = engine.evaluate(&state.phi, &state.forcing)?;
    records.retain(|r| r.step < state.step);
    loop {
        let converged = eval.rhs.oscillation() < config.tol_conv;
        let exhausted = state.step >= config.max_steps;
        if state.step % cadence == 0 || converged || exhausted {
            records.push(record(&state, &eval, &ctx));
            fill_f_fd(&mut records);
            for o in observers.iter_mut() {
                o.on_record(&state, &eval, &records)?;
            }
        }
        if converged || exhausted {
            return Ok(RunOutcome { state, eval, records, converged, halted: false });
        }
        if options.halt_at_step == Some(state.step) {
            for o in observers.iter_mut() {
                o.on_halt(&state, &records)?;
            }
            return Ok(RunOutcome { state, eval, records, converged: false, halted: true });
        }
        let report = engine.step(&mut state, &mut eval)?;
        for o in observers.iter_mut() {
            o.on_step(&state, &eval, &report)?;
        }
    }
}
