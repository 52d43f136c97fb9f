//! Configuration, persistence and the `qma` subcommands.
//!
//! Exit codes: 0 success, 1 verify failure, 2 calibration mismatch, 3 step
//! failure, 4 resume mismatch, 5 invalid input, 6 not converged.

mod commands;
mod config;
pub mod verify;

pub use commands::{
    calibration_thresholds, cmd_calibrate, cmd_resume, cmd_run, cmd_verify, cmd_verify_sized, execute_resume,
    execute_run, CommandError, RunControl, RunEnd, Summary, DIAGNOSTICS_FILE, EXIT_CALIBRATION_MISMATCH,
    EXIT_INVALID, EXIT_NOT_CONVERGED, EXIT_OK, EXIT_RESUME_MISMATCH, EXIT_STEP_FAILURE, EXIT_VERIFY_FAILED,
    FINAL_PHI_FILE, RESIDUAL_TOL, SNAPSHOT_DIR, SUMMARY_FILE,
};
pub use config::{
    config_hash, load_calibration, load_config, ConfigError, LoadedConfig, RunConfig, DEFAULT_SEED, MAX_GRID_POINTS,
    MAX_POINTS_N2,
};

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "qma", about = "Parabolic quaternionic Monge-Ampère flow on flat tori")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute κ and c_grad and write them as JSON.
    Calibrate {
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the identity suites with the configuration's seed.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the flow to convergence or `max_steps`.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, hide = true)]
        halt_at_step: Option<u64>,
    },
    /// Continue a run from its manifest.
    Resume {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, hide = true)]
        halt_at_step: Option<u64>,
    },
}

/// Sizes the global rayon pool from `QMA_THREADS`. Results do not depend on it.
pub fn init_threads() {
    if let Some(n) = std::env::var("QMA_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        // a pool built earlier in the process wins; that is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parses `args` (program name first) and dispatches; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    init_threads();
    match cli.command {
        Command::Calibrate { out } => cmd_calibrate(&out),
        Command::Verify { config } => cmd_verify(&config),
        Command::Run { config, halt_at_step } => cmd_run(&config, halt_at_step),
        Command::Resume { manifest, halt_at_step } => cmd_resume(&manifest, halt_at_step),
    }
}
