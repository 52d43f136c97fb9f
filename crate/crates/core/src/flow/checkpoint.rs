//! Rolling snapshot of `φ` plus a manifest with the scalar state.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{FlowError, FlowState};
use crate::grid::io::{read_snapshot, sidecar_path, write_snapshot};
use crate::grid::PeriodicScalarField;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SNAPSHOT_FILE: &str = "phi_latest.f64";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub step: u64,
    pub t: f64,
    pub dt: f64,
    pub config_hash: String,
    pub config_path: String,
    pub accepted_streak: u32,
    /// Relative to the manifest's directory.
    pub snapshot: String,
}

/// Writes the snapshot and then the manifest into `dir`.
pub fn write_checkpoint(dir: &Path, state: &FlowState, config_hash: &str, config_path: &str) -> Result<PathBuf, FlowError> {
    let tmp = dir.join(format!("{SNAPSHOT_FILE}.tmp"));
    let raw = dir.join(SNAPSHOT_FILE);
    write_snapshot(&state.phi, &tmp)?;
    fs::rename(&tmp, &raw)?;
    fs::rename(sidecar_path(&tmp), sidecar_path(&raw))?;
    let manifest = Manifest {
        step: state.step,
        t: state.t,
        dt: state.dt,
        config_hash: config_hash.to_string(),
        config_path: config_path.to_string(),
        accepted_streak: state.streak,
        snapshot: SNAPSHOT_FILE.to_string(),
    };
    let path = dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| FlowError::Checkpoint(e.to_string()))?;
    fs::write(&path, json)?;
    Ok(path)
}

pub fn read_manifest(path: &Path) -> Result<Manifest, FlowError> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| FlowError::Checkpoint(format!("{}: {e}", path.display())))
}

/// The manifest and the `φ` it points to.
pub fn read_checkpoint(path: &Path) -> Result<(Manifest, PeriodicScalarField), FlowError> {
    let manifest = read_manifest(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let raw = dir.join(&manifest.snapshot);
    if !raw.exists() {
        return Err(FlowError::Checkpoint(format!("snapshot {} is missing", raw.display())));
    }
    let phi = read_snapshot(&raw)?;
    Ok((manifest, phi))
}

/// Rebuilds the state saved in a checkpoint.
pub fn restore_state(manifest: &Manifest, phi: PeriodicScalarField, forcing: PeriodicScalarField) -> Result<FlowState, FlowError> {
    if phi.shape() != forcing.shape() {
        return Err(FlowError::Checkpoint("snapshot grid does not match the configuration".into()));
    }
    Ok(FlowState { phi, forcing, t: manifest.t, step: manifest.step, dt: manifest.dt, streak: manifest.accepted_streak })
}
