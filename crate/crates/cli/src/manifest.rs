//! Experiment manifests: each run that writes files also records the
//! resolved configuration, input hashes and a SHA-256 per output, so a rerun
//! with the same configuration can be checked byte-for-byte.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Serialize)]
pub struct Manifest {
    pub command: String,
    pub config: serde_json::Value,
    pub toolkit_version: String,
    pub timestamp: String,
    pub input_hashes: Vec<InputHash>,
    pub outputs: Vec<OutputRecord>,
}

#[derive(Serialize)]
pub struct InputHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

pub struct ManifestWriter {
    manifest: Manifest,
    /// Manifest lands next to the first output as `<out>.manifest.json`.
    manifest_path: Option<PathBuf>,
}

impl ManifestWriter {
    pub fn new(
        command: &str,
        config: serde_json::Value,
        config_path: Option<&Path>,
    ) -> Result<Self, CliError> {
        let mut writer = ManifestWriter {
            manifest: Manifest {
                command: command.to_string(),
                config,
                toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
                timestamp: chrono::Utc::now().to_rfc3339(),
                input_hashes: Vec::new(),
                outputs: Vec::new(),
            },
            manifest_path: None,
        };
        if let Some(path) = config_path {
            writer.add_input(path)?;
        }
        Ok(writer)
    }

    pub fn add_input(&mut self, path: &Path) -> Result<(), CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::config(format!("cannot hash input {}: {e}", path.display())))?;
        self.manifest.input_hashes.push(InputHash {
            path: path.display().to_string(),
            sha256: hex_digest(&bytes),
        });
        Ok(())
    }

    pub fn write_output(&mut self, path: &Path, bytes: &[u8]) -> Result<(), CliError> {
        std::fs::write(path, bytes)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))?;
        self.manifest.outputs.push(OutputRecord {
            path: path.display().to_string(),
            sha256: hex_digest(bytes),
            bytes: bytes.len(),
        });
        if self.manifest_path.is_none() {
            let mut name = path.file_name().unwrap_or_default().to_os_string();
            name.push(".manifest.json");
            self.manifest_path = Some(path.with_file_name(name));
        }
        Ok(())
    }

    /// Writes the manifest when at least one output file exists.
    pub fn finish(self, had_outputs: bool) -> Result<(), CliError> {
        let Some(path) = self.manifest_path else {
            debug_assert!(!had_outputs);
            return Ok(());
        };
        let mut bytes = serde_json::to_vec_pretty(&self.manifest).expect("manifest serializes");
        bytes.push(b'\n');
        std::fs::write(&path, bytes)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))?;
        Ok(())
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
