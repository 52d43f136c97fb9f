//! Field snapshots: raw little-endian `f64` plus a JSON sidecar.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{GridError, GridShape, PeriodicScalarField};

pub const AXIS_ORDER: &str = "x^r_0 blocks then x^r_1, x^r_2, x^r_3 blocks";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotSidecar {
    pub n: usize,
    #[serde(rename = "N")]
    pub points: usize,
    pub axis_order: String,
    pub layout: String,
    pub endianness: String,
}

/// Path of the sidecar belonging to a raw snapshot file.
pub fn sidecar_path(raw: &Path) -> PathBuf {
    let mut s = raw.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn encode_f64_le(values: &[f64]) -> Vec<u8> {
    values.iter().flat_map(|v| v.to_le_bytes()).collect()
}

pub fn decode_f64_le(bytes: &[u8]) -> Result<Vec<f64>, GridError> {
    if bytes.len() % 8 != 0 {
        return Err(GridError::Format(format!("{} bytes is not a whole number of f64", bytes.len())));
    }
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8"))).collect())
}

/// Writes `raw` and `raw.json`.
pub fn write_snapshot(field: &PeriodicScalarField, raw: &Path) -> Result<(), GridError> {
    let shape = field.shape();
    let sidecar = SnapshotSidecar {
        n: shape.n(),
        points: shape.points(),
        axis_order: AXIS_ORDER.to_string(),
        layout: "row-major".to_string(),
        endianness: "little".to_string(),
    };
    fs::write(raw, encode_f64_le(field.values()))?;
    let json = serde_json::to_string_pretty(&sidecar).map_err(|e| GridError::Format(e.to_string()))?;
    fs::write(sidecar_path(raw), json)?;
    Ok(())
}

pub fn read_snapshot(raw: &Path) -> Result<PeriodicScalarField, GridError> {
    let text = fs::read_to_string(sidecar_path(raw))?;
    let sidecar: SnapshotSidecar = serde_json::from_str(&text).map_err(|e| GridError::Format(e.to_string()))?;
    if sidecar.layout != "row-major" || sidecar.endianness != "little" {
        return Err(GridError::Format(format!("unsupported layout {} / {}", sidecar.layout, sidecar.endianness)));
    }
    let shape = GridShape::new(sidecar.n, sidecar.points)?;
    let values = decode_f64_le(&fs::read(raw)?)?;
    PeriodicScalarField::from_values(&shape, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let s = GridShape::new(1, 5).unwrap();
        let f = PeriodicScalarField::from_fn(&s, |x| (x[0] * 7.0).exp() - x[3] / 3.0);
        let p = dir.path().join("phi.f64");
        write_snapshot(&f, &p).unwrap();
        let g = read_snapshot(&p).unwrap();
        assert!(f.values().iter().zip(g.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
        let side: serde_json::Value = serde_json::from_str(&fs::read_to_string(sidecar_path(&p)).unwrap()).unwrap();
        assert_eq!(side["N"], 5);
        assert_eq!(side["endianness"], "little");
    }
}
