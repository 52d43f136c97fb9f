//! The four subcommands, as library functions returning exit codes.

use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{config_hash, load_calibration, load_config, ConfigError, LoadedConfig};
use super::verify::{all_suites, render_table, SuiteSizes};
use crate::diagnostics::{parse_csv, render_row, write_csv, DiagnosticsRecord, CSV_HEADER};
use crate::flow::checkpoint::{read_checkpoint, restore_state, write_checkpoint};
use crate::flow::{forcing_field, run, Evaluation, FlowEngine, FlowError, FlowState, Observer, RunOptions, RunOutcome};
use crate::forms::{calibrate_kappa, CalibrationReport, FormError};
use crate::grid::io::write_snapshot;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CALIBRATION_MISMATCH: i32 = 2;
pub const EXIT_STEP_FAILURE: i32 = 3;
pub const EXIT_RESUME_MISMATCH: i32 = 4;
/// Invalid configuration, missing inputs, or I/O failure.
pub const EXIT_INVALID: i32 = 5;
/// The run stopped at `max_steps`, or converged with too large a residual.
pub const EXIT_NOT_CONVERGED: i32 = 6;

/// A run exits 0 only if it converged with an elliptic residual at most this.
pub const RESIDUAL_TOL: f64 = 1e-5;

pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const FINAL_PHI_FILE: &str = "final_phi.f64";
pub const SNAPSHOT_DIR: &str = "snapshots";

/// Per-key ceilings on the calibration residuals.
pub fn calibration_thresholds(key: &str) -> f64 {
    match key {
        "c_grad_one_mode" => 1e-9,
        _ => 1e-10,
    }
}

pub fn cmd_calibrate(out: &Path) -> i32 {
    let report = match calibrate_kappa() {
        Ok(r) => r,
        Err(FormError::CalibrationMismatch { kappa, gap }) => {
            eprintln!("calibration mismatch: kappa = {kappa}, routes differ by {gap:e}");
            return EXIT_CALIBRATION_MISMATCH;
        }
        Err(e) => {
            eprintln!("calibration failed: {e}");
            return EXIT_CALIBRATION_MISMATCH;
        }
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    if let Err(e) = fs::write(out, json) {
        eprintln!("cannot write {}: {e}", out.display());
        return EXIT_INVALID;
    }
    println!("kappa = {}", report.kappa);
    println!("c_grad = {}", report.c_grad);
    let mut ok = true;
    for (key, &value) in &report.residuals {
        let limit = calibration_thresholds(key);
        let pass = value <= limit;
        ok &= pass;
        println!("{key:<30} {value:>12.3e}  (<= {limit:.0e}) {}", if pass { "ok" } else { "FAIL" });
    }
    if ok {
        EXIT_OK
    } else {
        EXIT_CALIBRATION_MISMATCH
    }
}

fn load(config_path: &Path) -> Result<(LoadedConfig, CalibrationReport), ConfigError> {
    let loaded = load_config(config_path)?;
    let calibration = load_calibration(&loaded.calibration_path)?;
    Ok((loaded, calibration))
}

pub fn cmd_verify(config_path: &Path) -> i32 {
    cmd_verify_sized(config_path, SuiteSizes::default())
}

/// [`cmd_verify`] with explicit suite sizes.
pub fn cmd_verify_sized(config_path: &Path, sizes: SuiteSizes) -> i32 {
    let (loaded, calibration) = match load(config_path) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_INVALID;
        }
    };
    println!("seed = {}, kappa = {}", loaded.config.seed, calibration.kappa);
    let results = all_suites(loaded.config.seed, calibration.kappa, sizes);
    print!("{}", render_table(&results));
    if results.iter().all(|r| r.passed()) {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub converged: bool,
    pub steps: u64,
    pub final_residual: f64,
    pub b: f64,
    pub f_final: f64,
}

/// Appends each record to `diagnostics.csv` and then writes a checkpoint, so
/// the file on disk always covers the steps before the manifest.
struct Persistence {
    out_dir: PathBuf,
    snapshot_dir: PathBuf,
    csv: File,
    hash: String,
    config_path: String,
}

impl Persistence {
    fn open(out_dir: &Path, records: &[DiagnosticsRecord], hash: String, config_path: &Path) -> Result<Self, FlowError> {
        let snapshot_dir = out_dir.join(SNAPSHOT_DIR);
        fs::create_dir_all(&snapshot_dir)?;
        let mut csv = File::create(out_dir.join(DIAGNOSTICS_FILE))?;
        writeln!(csv, "{CSV_HEADER}")?;
        for r in records {
            csv.write_all(render_row(r).as_bytes())?;
        }
        let config_path = fs::canonicalize(config_path)?.to_string_lossy().into_owned();
        Ok(Self { out_dir: out_dir.to_path_buf(), snapshot_dir, csv, hash, config_path })
    }

    fn finish(&self, records: &[DiagnosticsRecord]) -> Result<(), FlowError> {
        write_csv(&self.out_dir.join(DIAGNOSTICS_FILE), records)?;
        Ok(())
    }
}

impl Observer for Persistence {
    fn on_record(&mut self, state: &FlowState, _eval: &Evaluation, records: &[DiagnosticsRecord]) -> Result<(), FlowError> {
        let last = records.last().expect("on_record follows a push");
        self.csv.write_all(render_row(last).as_bytes())?;
        self.csv.flush()?;
        write_checkpoint(&self.snapshot_dir, state, &self.hash, &self.config_path)?;
        Ok(())
    }

    fn on_halt(&mut self, state: &FlowState, records: &[DiagnosticsRecord]) -> Result<(), FlowError> {
        self.finish(records)?;
        write_checkpoint(&self.snapshot_dir, state, &self.hash, &self.config_path)?;
        Ok(())
    }
}

/// How a run invoked through the CLI layer ended.
#[derive(Debug)]
pub enum RunEnd {
    Finished { outcome: RunOutcome, summary: Summary },
    Halted { outcome: RunOutcome },
}

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("resume refused: {0}")]
    Resume(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Flow(FlowError::StepFailure { .. }) => EXIT_STEP_FAILURE,
            CommandError::Resume(_) => EXIT_RESUME_MISMATCH,
            _ => EXIT_INVALID,
        }
    }
}

/// Optional knobs for [`execute_run`] beyond the configuration file.
#[derive(Default)]
pub struct RunControl<'a> {
    /// Stop after recording this step, leaving a checkpoint to resume from.
    pub halt_at_step: Option<u64>,
    /// Extra observers, called after the persistence observer.
    pub observers: Vec<&'a mut dyn Observer>,
}

fn finish_run(
    loaded: &LoadedConfig,
    engine: &FlowEngine,
    state: FlowState,
    records: Vec<DiagnosticsRecord>,
    calibration: &CalibrationReport,
    mut control: RunControl<'_>,
) -> Result<RunEnd, CommandError> {
    let out_dir = &loaded.out_dir;
    fs::create_dir_all(out_dir).map_err(FlowError::from)?;
    let hash = config_hash(&loaded.config, calibration);
    let mut persistence = Persistence::open(out_dir, &records, hash, &loaded.path)?;
    let options = RunOptions { cadence: loaded.config.cadence, c_grad: calibration.c_grad, halt_at_step: control.halt_at_step };
    let outcome = {
        let mut observers: Vec<&mut dyn Observer> = vec![&mut persistence];
        for o in control.observers.iter_mut() {
            observers.push(&mut **o);
        }
        run(engine, state, records, options, &mut observers)?
    };
    if outcome.halted {
        return Ok(RunEnd::Halted { outcome });
    }
    persistence.finish(&outcome.records)?;
    write_snapshot(&outcome.state.phi, &out_dir.join(FINAL_PHI_FILE)).map_err(FlowError::from)?;
    let last = outcome.records.last().expect("a finished run records its last step");
    let summary = Summary {
        converged: outcome.converged,
        steps: outcome.state.step,
        final_residual: last.residual,
        b: last.b,
        f_final: last.f,
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
    fs::write(out_dir.join(SUMMARY_FILE), json).map_err(FlowError::from)?;
    Ok(RunEnd::Finished { outcome, summary })
}

fn engine_for(loaded: &LoadedConfig, calibration: &CalibrationReport) -> Result<FlowEngine, CommandError> {
    Ok(FlowEngine::new(loaded.config.flow_config(calibration.kappa))?)
}

/// `run` as a library call.
pub fn execute_run(config_path: &Path, control: RunControl<'_>) -> Result<RunEnd, CommandError> {
    let (loaded, calibration) = load(config_path)?;
    let engine = engine_for(&loaded, &calibration)?;
    let forcing = forcing_field(engine.shape(), &loaded.config.f_modes);
    let state = FlowState::initial(engine.config(), forcing);
    finish_run(&loaded, &engine, state, Vec::new(), &calibration, control)
}

/// `resume` as a library call.
pub fn execute_resume(manifest_path: &Path, control: RunControl<'_>) -> Result<RunEnd, CommandError> {
    let (manifest, phi) = read_checkpoint(manifest_path).map_err(|e| CommandError::Resume(e.to_string()))?;
    let (loaded, calibration) =
        load(Path::new(&manifest.config_path)).map_err(|e| CommandError::Resume(e.to_string()))?;
    let hash = config_hash(&loaded.config, &calibration);
    if hash != manifest.config_hash {
        return Err(CommandError::Resume(format!(
            "configuration hash {hash} differs from the manifest's {}",
            manifest.config_hash
        )));
    }
    let engine = engine_for(&loaded, &calibration)?;
    let forcing = forcing_field(engine.shape(), &loaded.config.f_modes);
    let state = restore_state(&manifest, phi, forcing).map_err(|e| CommandError::Resume(e.to_string()))?;
    let csv_path = loaded.out_dir.join(DIAGNOSTICS_FILE);
    let text = fs::read_to_string(&csv_path)
        .map_err(|e| CommandError::Resume(format!("{}: {e}", csv_path.display())))?;
    let mut records =
        parse_csv(&text).map_err(|e| CommandError::Resume(format!("{}: {e}", csv_path.display())))?;
    records.retain(|r| r.step < state.step);
    finish_run(&loaded, &engine, state, records, &calibration, control)
}

fn report(end: Result<RunEnd, CommandError>) -> i32 {
    match end {
        Ok(RunEnd::Finished { summary, .. }) => {
            println!(
                "converged = {}, steps = {}, residual = {:e}, b = {}, f = {:e}",
                summary.converged, summary.steps, summary.final_residual, summary.b, summary.f_final
            );
            if summary.converged && summary.final_residual <= RESIDUAL_TOL {
                EXIT_OK
            } else {
                EXIT_NOT_CONVERGED
            }
        }
        Ok(RunEnd::Halted { outcome }) => {
            println!("halted at step {}", outcome.state.step);
            EXIT_OK
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

pub fn cmd_run(config_path: &Path, halt_at_step: Option<u64>) -> i32 {
    report(execute_run(config_path, RunControl { halt_at_step, ..Default::default() }))
}

pub fn cmd_resume(manifest_path: &Path, halt_at_step: Option<u64>) -> i32 {
    report(execute_resume(manifest_path, RunControl { halt_at_step, ..Default::default() }))
}
