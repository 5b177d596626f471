//! Per-directory record of how an artifact was produced.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub argv: Vec<String>,
    /// Resolved options after defaults and environment were applied.
    pub config: serde_json::Value,
    pub corpus_checksum: Option<String>,
    pub encoders: Vec<String>,
    pub seeds: Vec<u64>,
    pub deterministic: bool,
    /// Unix seconds.
    pub started_at: f64,
    pub finished_at: Option<f64>,
    pub outputs: Vec<PathBuf>,
}

pub fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

impl RunManifest {
    pub fn start(command: &str, argv: Vec<String>, config: serde_json::Value) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            argv,
            config,
            corpus_checksum: None,
            encoders: Vec::new(),
            seeds: Vec::new(),
            deterministic: false,
            started_at: unix_now(),
            finished_at: None,
            outputs: Vec::new(),
        }
    }

    /// Stamps the finish time and writes `manifest.json` into `dir`,
    /// replacing any earlier one.
    pub fn finish(mut self, dir: &Path) -> Result<PathBuf> {
        self.finished_at = Some(unix_now());
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(MANIFEST_FILE);
        std::fs::write(&path, serde_json::to_vec_pretty(&self)?).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        Ok(serde_json::from_slice(&bytes)?)
    }
}
