//! Halts a run, writes a checkpoint, reads it back and finishes the run.
//! The final potential matches an uninterrupted run bit for bit.

use qma_flow::flow::checkpoint::{read_checkpoint, restore_state, write_checkpoint};
use qma_flow::flow::{forcing_field, run, FMode, FlowConfig, FlowEngine, FlowState, RunOptions};

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let config = FlowConfig::new(1, 8, 1.0);
    let engine = FlowEngine::new(config.clone()).unwrap();
    let forcing = forcing_field(engine.shape(), &[FMode { wave: vec![0, 0, 1, 0], amplitude: 0.4 }]);
    let options = RunOptions { cadence: 50, c_grad: 2.0, halt_at_step: None };

    let straight = run(&engine, FlowState::initial(&config, forcing.clone()), Vec::new(), options, &mut []).unwrap();

    let halting = RunOptions { halt_at_step: Some(120), ..options };
    let first = run(&engine, FlowState::initial(&config, forcing.clone()), Vec::new(), halting, &mut []).unwrap();
    println!("halted = {} at step {}", first.halted, first.state.step);
    let manifest_path = write_checkpoint(dir.path(), &first.state, "example", "none").unwrap();

    let (manifest, phi) = read_checkpoint(&manifest_path).unwrap();
    println!("manifest: step {} t {} dt {}", manifest.step, manifest.t, manifest.dt);
    let state = restore_state(&manifest, phi, forcing).unwrap();
    let resumed = run(&engine, state, first.records, options, &mut []).unwrap();

    let same = resumed.state.phi.values().iter().zip(straight.state.phi.values()).all(|(a, b)| a.to_bits() == b.to_bits());
    println!("resumed to step {} (straight run: {}), identical phi = {same}", resumed.state.step, straight.state.step);
    println!("identical records = {}", resumed.records == straight.records);
}
