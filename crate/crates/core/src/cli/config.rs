//! The JSON run configuration.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::flow::{FMode, FlowConfig, Stepper};
use crate::forms::CalibrationReport;
use crate::grid::DerivativeMode;

/// Largest number of grid points a configuration may request.
pub const MAX_GRID_POINTS: usize = 1 << 26;

/// Largest `N` accepted at `n = 2`.
pub const MAX_POINTS_N2: usize = 6;

pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    #[serde(rename = "N")]
    pub points: usize,
    #[serde(rename = "F_modes")]
    pub f_modes: Vec<FMode>,
    #[serde(default = "defaults::sigma")]
    pub sigma: f64,
    #[serde(default = "defaults::eps_pos")]
    pub eps_pos: f64,
    #[serde(default = "defaults::tol_conv")]
    pub tol_conv: f64,
    #[serde(default = "defaults::max_steps")]
    pub max_steps: u64,
    #[serde(default = "defaults::cadence")]
    pub cadence: u64,
    pub out_dir: PathBuf,
    #[serde(default = "defaults::calibration_path")]
    pub calibration_path: PathBuf,
    #[serde(default)]
    pub stepper: Stepper,
    #[serde(default)]
    pub derivative_mode: DerivativeMode,
    #[serde(default = "defaults::seed")]
    pub seed: u64,
}

mod defaults {
    use std::path::PathBuf;

    pub fn sigma() -> f64 {
        0.2
    }
    pub fn eps_pos() -> f64 {
        1e-6
    }
    pub fn tol_conv() -> f64 {
        1e-8
    }
    pub fn max_steps() -> u64 {
        100_000
    }
    pub fn cadence() -> u64 {
        10
    }
    pub fn calibration_path() -> PathBuf {
        PathBuf::from("calibration.json")
    }
    pub fn seed() -> u64 {
        super::DEFAULT_SEED
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed configuration: {0}")]
    Parse(String),
    #[error("{field}: {message}")]
    Range { field: &'static str, message: String },
    #[error("calibration {path}: {message}")]
    Calibration { path: PathBuf, message: String },
}

fn range(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Range { field, message: message.into() }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(1..=2).contains(&self.n) {
            return Err(range("n", format!("must be 1 or 2, got {}", self.n)));
        }
        let min_points = match self.derivative_mode {
            DerivativeMode::Fd4 => 5,
            DerivativeMode::Spectral => 2,
        };
        if self.points < min_points {
            return Err(range("N", format!("must be at least {min_points} for this derivative mode")));
        }
        if self.n == 2 && self.points > MAX_POINTS_N2 {
            return Err(range("N", format!("n = 2 grids are limited to N <= {MAX_POINTS_N2}")));
        }
        let total = (self.points as f64).powi(4 * self.n as i32);
        if total > MAX_GRID_POINTS as f64 {
            return Err(range("N", format!("N^(4n) = {total:e} exceeds {MAX_GRID_POINTS} grid points")));
        }
        for (k, m) in self.f_modes.iter().enumerate() {
            if m.wave.len() != 4 * self.n {
                return Err(range("F_modes", format!("mode {k}: wave has {} entries, expected {}", m.wave.len(), 4 * self.n)));
            }
            if let Some(w) = m.wave.iter().find(|w| 2 * w.unsigned_abs() >= self.points as u64) {
                return Err(range("F_modes", format!("mode {k}: wave number {w} is not resolved by N = {}", self.points)));
            }
            if !m.amplitude.is_finite() {
                return Err(range("F_modes", format!("mode {k}: amplitude must be finite")));
            }
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return Err(range("sigma", "must lie in (0, 1)"));
        }
        if !(self.eps_pos >= 0.0 && self.eps_pos.is_finite()) {
            return Err(range("eps_pos", "must be finite and nonnegative"));
        }
        if !(self.tol_conv > 0.0 && self.tol_conv.is_finite()) {
            return Err(range("tol_conv", "must be finite and positive"));
        }
        if self.cadence == 0 {
            return Err(range("cadence", "must be at least 1"));
        }
        if self.out_dir.as_os_str().is_empty() {
            return Err(range("out_dir", "must not be empty"));
        }
        Ok(())
    }

    /// Compact JSON with every field spelled out, defaults included.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn flow_config(&self, kappa: f64) -> FlowConfig {
        FlowConfig {
            n: self.n,
            points: self.points,
            kappa,
            sigma: self.sigma,
            eps_pos: self.eps_pos,
            tol_conv: self.tol_conv,
            max_steps: self.max_steps,
            stepper: self.stepper,
            mode: self.derivative_mode,
        }
    }
}

/// A validated configuration with its relative paths resolved against the
/// directory of the file it came from.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub path: PathBuf,
    pub out_dir: PathBuf,
    pub calibration_path: PathBuf,
}

pub fn load_config(path: &Path) -> Result<LoadedConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
    let config = RunConfig::from_json(&text)?;
    let base = path.parent().unwrap_or(Path::new("."));
    Ok(LoadedConfig {
        out_dir: base.join(&config.out_dir),
        calibration_path: base.join(&config.calibration_path),
        path: path.to_path_buf(),
        config,
    })
}

pub fn load_calibration(path: &Path) -> Result<CalibrationReport, ConfigError> {
    let fail = |message: String| ConfigError::Calibration { path: path.to_path_buf(), message };
    let text = fs::read_to_string(path).map_err(|e| fail(e.to_string()))?;
    let report: CalibrationReport = serde_json::from_str(&text).map_err(|e| fail(e.to_string()))?;
    if !(report.kappa > 0.0 && report.kappa.is_finite()) {
        return Err(fail(format!("kappa = {} is not positive", report.kappa)));
    }
    if !report.c_grad.is_finite() {
        return Err(fail("c_grad is not finite".into()));
    }
    Ok(report)
}

/// Hex sha256 over the canonical configuration and the calibrated constants.
pub fn config_hash(config: &RunConfig, calibration: &CalibrationReport) -> String {
    let mut h = Sha256::new();
    h.update(config.canonical_json().as_bytes());
    h.update(calibration.kappa.to_le_bytes());
    h.update(calibration.c_grad.to_le_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"n": 1, "N": 8, "F_modes": [], "out_dir": "out"}"#;

    #[test]
    fn defaults_fill_in() {
        let c = RunConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.sigma, 0.2);
        assert_eq!(c.cadence, 10);
        assert_eq!(c.stepper, Stepper::Heun);
        assert_eq!(c.seed, DEFAULT_SEED);
        let again = RunConfig::from_json(&c.canonical_json()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{"n": 1, "N": 8, "F_modes": [], "out_dir": "out", "dt": 0.1}"#;
        assert!(matches!(RunConfig::from_json(text), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn ranges_are_checked() {
        for bad in [
            r#"{"n": 3, "N": 8, "F_modes": [], "out_dir": "o"}"#,
            r#"{"n": 1, "N": 4, "F_modes": [], "out_dir": "o"}"#,
            r#"{"n": 1, "N": 8, "F_modes": [], "out_dir": "o", "sigma": 1.5}"#,
            r#"{"n": 1, "N": 8, "F_modes": [{"wave": [1, 0, 0], "amplitude": 1.0}], "out_dir": "o"}"#,
            r#"{"n": 1, "N": 8, "F_modes": [{"wave": [4, 0, 0, 0], "amplitude": 1.0}], "out_dir": "o"}"#,
            r#"{"n": 1, "N": 8, "F_modes": [], "out_dir": "o", "cadence": 0}"#,
            r#"{"n": 2, "N": 7, "F_modes": [], "out_dir": "o"}"#,
        ] {
            assert!(matches!(RunConfig::from_json(bad), Err(ConfigError::Range { .. })), "{bad}");
        }
    }
}
