//! Plain-text artifact writers: CSV tables and JSON run manifests.
//!
//! Every file is written atomically enough for scripted pipelines (full
//! content buffered, then one write call) and floats use Rust's shortest
//! round-trip formatting so replayed runs produce byte-identical files.

use crate::engine::{ResidualSample, SteadyResult};
use crate::gas::FlowState;
use serde::Serialize;
use std::fs;
use std::io::Write as _;
use std::path::Path;

/// Write a steady flow field as CSV: x, A, rho, u, p, T, M.
pub fn write_field_csv(
    path: &Path,
    x: &[f64],
    area: &[f64],
    field: &[FlowState],
) -> std::io::Result<()> {
    let mut out = String::from("x,A,rho,u,p,T,M\n");
    for i in 0..field.len() {
        let s = &field[i];
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            x[i], area[i], s.rho, s.u, s.p, s.t, s.mach
        ));
    }
    write_atomic(path, out.as_bytes())
}

/// Write a residual history as CSV: iteration, rms_mass, rms_energy,
/// mass_imbalance.
pub fn write_residuals_csv(path: &Path, history: &[ResidualSample]) -> std::io::Result<()> {
    let mut out = String::from("iteration,rms_mass,rms_energy,mass_imbalance\n");
    for h in history {
        out.push_str(&format!(
            "{},{},{},{}\n",
            h.iteration, h.rms_mass, h.rms_energy, h.mass_imbalance
        ));
    }
    write_atomic(path, out.as_bytes())
}

/// Write both artifacts of a steady solve next to each other.
pub fn write_steady_result(
    dir: &Path,
    stem: &str,
    x: &[f64],
    area: &[f64],
    result: &SteadyResult,
) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    write_field_csv(&dir.join(format!("{stem}_field.csv")), x, area, &result.field)?;
    write_residuals_csv(
        &dir.join(format!("{stem}_residuals.csv")),
        &result.residual_history,
    )
}

/// Serialize any config/summary value as pretty JSON.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let body = serde_json::to_string_pretty(value)
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
    write_atomic(path, body.as_bytes())
}

/// FNV-1a hash of a byte string; used to fingerprint configs in manifests.
pub fn fingerprint(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut f = fs::File::create(path)?;
    f.write_all(bytes)
}
