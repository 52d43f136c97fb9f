//! Watches a run with an observer: energy, dissipation, bound monitors and the
//! late-time decay rate of `f`.

use qma_flow::diagnostics::{
    dissipation_d, energy_f, fit_f_second_derivative, lemma_monitors, mabuchi_m, DiagnosticsRecord,
};
use qma_flow::flow::{
    forcing_field, run, Evaluation, FMode, FlowConfig, FlowEngine, FlowError, FlowState, Observer, RunOptions,
};
use qma_flow::grid::DerivativeMode;

struct Printer {
    kappa: f64,
}

impl Observer for Printer {
    fn on_record(&mut self, state: &FlowState, eval: &Evaluation, _records: &[DiagnosticsRecord]) -> Result<(), FlowError> {
        if state.step % 100 != 0 {
            return Ok(());
        }
        let m = lemma_monitors(state, eval, self.kappa);
        println!(
            "{:>6} {:>10.5} {:>12.4e} {:>12.4e} {:>12.4e} {:>10.6} {:>10.6}",
            state.step,
            state.t,
            energy_f(eval),
            dissipation_d(eval, self.kappa, 2.0, DerivativeMode::Fd4),
            mabuchi_m(eval),
            m.osc_phi,
            m.max_q
        );
        Ok(())
    }
}

fn main() {
    let mut config = FlowConfig::new(1, 8, 1.0);
    config.max_steps = 1500;
    let engine = FlowEngine::new(config.clone()).unwrap();
    let forcing = forcing_field(engine.shape(), &[FMode { wave: vec![1, 1, 0, 0], amplitude: 0.3 }]);

    println!("{:>6} {:>10} {:>12} {:>12} {:>12} {:>10} {:>10}", "step", "t", "f", "D", "M", "osc phi", "max Q");
    let mut printer = Printer { kappa: config.kappa };
    let options = RunOptions { cadence: 2, c_grad: 2.0, halt_at_step: None };
    let out = run(&engine, FlowState::initial(&config, forcing), Vec::new(), options, &mut [&mut printer]).unwrap();

    // past D ~ 1e-12 the differences of f are roundoff
    let live: Vec<_> = out.records.iter().filter(|r| r.d > 1e-12).cloned().collect();
    match fit_f_second_derivative(&live, 20) {
        Some(c) => {
            let (a, b) = (&live[live.len() - 20], &live[live.len() - 1]);
            println!("decay rate of f' from f: {c:.2}, from D: {:.2}", (a.d / b.d).ln() / (b.t - a.t));
        }
        None => println!("f is flat over the last records"),
    }
}
