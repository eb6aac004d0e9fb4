use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use qtrl_core::TrainConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliResult;
use crate::io::{git_blob_hash, write_atomic};

pub const ARTIFACT_VERSION: u32 = 1;
pub const CONSTANTS_PATH: &str = "docs/environment-constants.toml";
pub const CONSTANTS_TOML: &str = include_str!("../../../docs/environment-constants.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsRef {
    pub path: String,
    pub git_blob_sha1: String,
}

impl ConstantsRef {
    pub fn current() -> Self {
        Self {
            path: CONSTANTS_PATH.into(),
            git_blob_sha1: git_blob_hash(CONSTANTS_TOML.as_bytes()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub episodes_run: usize,
    pub last_10_average: f64,
    pub last_100_average: f64,
    pub best_last_100_average: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact_version: u32,
    pub tool_version: String,
    pub config: TrainConfig,
    pub qubits: Option<usize>,
    pub trainable_parameters: usize,
    pub policy_parameters: usize,
    pub constants: ConstantsRef,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    pub log: PathBuf,
    pub policy: PathBuf,
    pub summary: RunSummary,
}

impl RunManifest {
    pub fn save(&self, path: &Path) -> CliResult<()> {
        save_json(path, self)
    }
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn unix_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}
