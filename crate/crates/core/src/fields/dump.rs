use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ComplexField, FieldError, GridSpec};

/// JSON companion of a binary field dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSidecar {
    pub dim: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub offsets: Vec<f64>,
    pub time: f64,
    pub scenario_hash: String,
}

fn with_ext(base: &Path, ext: &str) -> PathBuf {
    let mut name = base.as_os_str().to_owned();
    name.push(ext);
    PathBuf::from(name)
}

/// Writes `<base>.bin` (little-endian `f64` pairs `re, im`, row-major) and
/// `<base>.json`. Returns both paths.
pub fn write_field(
    base: &Path,
    field: &ComplexField,
    time: f64,
    scenario_hash: &str,
) -> Result<(PathBuf, PathBuf), FieldError> {
    let g = field.grid();
    let mut bytes = Vec::with_capacity(field.values().len() * 16);
    for v in field.values() {
        bytes.extend_from_slice(&v.re.to_le_bytes());
        bytes.extend_from_slice(&v.im.to_le_bytes());
    }
    let bin = with_ext(base, ".bin");
    let json = with_ext(base, ".json");
    fs::write(&bin, bytes)?;
    let sidecar = FieldSidecar {
        dim: g.dim,
        n: g.n(),
        l: g.half_width,
        offsets: g.offsets.clone(),
        time,
        scenario_hash: scenario_hash.to_string(),
    };
    fs::write(&json, serde_json::to_string_pretty(&sidecar)?)?;
    Ok((bin, json))
}

pub fn read_field(base: &Path) -> Result<(ComplexField, FieldSidecar), FieldError> {
    let sidecar: FieldSidecar = serde_json::from_str(&fs::read_to_string(with_ext(base, ".json"))?)?;
    let bytes = fs::read(with_ext(base, ".bin"))?;
    let grid = GridSpec::with_offsets(sidecar.dim, sidecar.l, sidecar.n, sidecar.offsets.clone())?;
    if bytes.len() != grid.len() * 16 {
        return Err(FieldError::SizeMismatch { expected: grid.len() * 16, got: bytes.len() });
    }
    let word = |c: &[u8]| f64::from_le_bytes(c.try_into().expect("8-byte chunk"));
    let values = bytes.chunks_exact(16).map(|c| Complex64::new(word(&c[..8]), word(&c[8..]))).collect();
    Ok((ComplexField::new(grid, values)?, sidecar))
}
