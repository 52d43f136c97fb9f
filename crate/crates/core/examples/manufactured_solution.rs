//! Recovers `φ* = 0.002·sin(2πx⁰)` from the forcing it induces and prints the
//! error on refining grids.

use std::f64::consts::TAU;

use qma_flow::flow::{normalize, run, FlowConfig, FlowEngine, FlowState, RunOptions};
use qma_flow::grid::PeriodicScalarField;

fn main() {
    let kappa = 1.0;
    let amplitude = 0.002;
    let mut previous: Option<f64> = None;
    for points in [8, 12, 16] {
        let config = FlowConfig::new(1, points, kappa);
        let engine = FlowEngine::new(config.clone()).unwrap();
        let shape = engine.shape();
        let exact = PeriodicScalarField::from_fn(shape, |x| amplitude * (TAU * x[0]).sin());
        let forcing = PeriodicScalarField::from_fn(shape, |x| (1.0 - kappa * TAU * TAU * amplitude * (TAU * x[0]).sin()).ln());
        let options = RunOptions { cadence: u64::MAX, c_grad: 2.0, halt_at_step: None };
        let out = run(&engine, FlowState::initial(&config, forcing), Vec::new(), options, &mut []).unwrap();
        let err = normalize(&out.state.phi).max_abs_diff(&normalize(&exact));
        let ratio = previous.map(|p| format!("{:.3}", p / err)).unwrap_or_default();
        println!("N = {points:>2}  steps {:>6}  err {err:.4e}  err*N^4 {:.4}  {ratio}", out.state.step, err * (points as f64).powi(4));
        previous = Some(err);
    }
}
