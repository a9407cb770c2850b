use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use frontier_tails::tail_tests::{write_atomic, ARTIFACT_VERSION};

use crate::failure::{CliResult, Failure};

/// Provenance written next to every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command_line: Vec<String>,
    pub seed: Option<u64>,
    pub input_digests: BTreeMap<String, String>,
    pub calibration_ids: Vec<String>,
    pub artifact_version: u32,
    pub timestamp_unix: u64,
}

impl RunManifest {
    pub fn new(seed: Option<u64>) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command_line: std::env::args().collect(),
            seed,
            input_digests: BTreeMap::new(),
            calibration_ids: Vec::new(),
            artifact_version: ARTIFACT_VERSION,
            timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        }
    }

    pub fn add_input(&mut self, path: &Path, bytes: &[u8]) {
        let digest = Sha256::digest(bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.input_digests.insert(path.display().to_string(), format!("sha256:{hex}"));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }
}

/// `out.csv` -> `out.csv.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    output.with_file_name(name)
}

/// Writes `body` to `output` (or stdout) and the manifest beside it (or to
/// stderr).
pub fn emit(output: Option<&Path>, body: &[u8], manifest: &RunManifest) -> CliResult<()> {
    match output {
        Some(path) => {
            write_atomic(path, body).map_err(|e| Failure::io(&format!("writing {}", path.display()), e))?;
            let m = manifest_path(path);
            write_atomic(&m, manifest.to_json().as_bytes())
                .map_err(|e| Failure::io(&format!("writing {}", m.display()), e))
        }
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(body)
                .map_err(|e| Failure::io("writing to stdout", e))?;
            eprint!("{}", manifest.to_json());
            Ok(())
        }
    }
}
