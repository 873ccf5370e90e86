//! Run manifests: enough to reproduce a run exactly.

use serde::Serialize;
use sfrj_core::io::{fingerprint, write_json};
use std::path::Path;

#[derive(Debug, Serialize)]
pub struct Manifest<C: Serialize, S: Serialize> {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub config: C,
    pub config_fingerprint: String,
    pub wall_clock_s: f64,
    pub summary: S,
}

pub fn write_manifest<C: Serialize, S: Serialize>(
    path: &Path,
    command: &str,
    seed: u64,
    config: C,
    wall_clock_s: f64,
    summary: S,
) -> std::io::Result<()> {
    let config_json = serde_json::to_string(&config).expect("config serializes");
    let manifest = Manifest {
        command: command.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        config,
        config_fingerprint: fingerprint(config_json.as_bytes()),
        wall_clock_s,
        summary,
    };
    write_json(path, &manifest)
}
