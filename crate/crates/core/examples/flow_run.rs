//! Runs the flow for `F = 0.5·cos(2πx⁰)` on a 12-point grid and prints the
//! diagnostics table.

use qma_flow::diagnostics::{compute_b, render_csv};
use qma_flow::flow::{forcing_field, run, FMode, FlowConfig, FlowEngine, FlowState, RunOptions};

fn main() {
    let config = FlowConfig::new(1, 12, 1.0);
    let engine = FlowEngine::new(config.clone()).unwrap();
    let forcing = forcing_field(engine.shape(), &[FMode { wave: vec![1, 0, 0, 0], amplitude: 0.5 }]);
    let b = compute_b(&forcing);

    let options = RunOptions { cadence: 200, c_grad: 2.0, halt_at_step: None };
    let out = run(&engine, FlowState::initial(&config, forcing), Vec::new(), options, &mut []).unwrap();

    print!("{}", render_csv(&out.records));
    println!("converged = {} after {} steps, t = {:.4}", out.converged, out.state.step, out.state.t);
    println!("phi_t range [{:.9}, {:.9}], log b = {:.9}", out.eval.rhs.min(), out.eval.rhs.max(), b.ln());
}
