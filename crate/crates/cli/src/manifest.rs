use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;
use crate::output::{read_input, sha256_hex};

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub file: String,
    pub sha256: String,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: &'static str,
    pub version: &'static str,
    pub config: Value,
    pub inputs: BTreeMap<&'static str, InputDigest>,
    pub seeds: BTreeMap<&'static str, u64>,
}

impl RunManifest {
    pub fn new(subcommand: &'static str, config: &impl Serialize) -> Result<Self, CliError> {
        Ok(RunManifest {
            subcommand,
            version: env!("CARGO_PKG_VERSION"),
            config: serde_json::to_value(config).map_err(|e| CliError::Validation(e.to_string()))?,
            inputs: BTreeMap::new(),
            seeds: BTreeMap::new(),
        })
    }

    /// Read an input file, recording its digest under `role`.
    pub fn read(&mut self, role: &'static str, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = read_input(path)?;
        let file = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        self.inputs.insert(
            role,
            InputDigest {
                file,
                sha256: sha256_hex(&bytes),
            },
        );
        Ok(bytes)
    }
}
