//! Run manifest written as `manifest.json` into every output directory.
//!
//! Everything outside the `run` object depends only on the inputs and the
//! effective configuration. `run` records when the run happened and which
//! stages were computed or served from the cache.

use std::path::Path;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::cache::sha256_hex;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageSource {
    Computed,
    Cached,
    /// A cache entry failed verification and the stage was recomputed.
    Rebuilt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub source: StageSource,
    pub millis: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub stages: Vec<StageRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub subcommand: String,
    pub corpus_sha256: Option<String>,
    pub scheme_sha256: Option<String>,
    pub config: serde_json::Value,
    pub outputs: Vec<OutputFile>,
    pub run: RunInfo,
}

impl RunManifest {
    pub fn new(subcommand: &str, config: serde_json::Value) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            tool_version: TOOL_VERSION.into(),
            subcommand: subcommand.into(),
            corpus_sha256: None,
            scheme_sha256: None,
            config,
            outputs: Vec::new(),
            run: RunInfo {
                timestamp: SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .unwrap_or(Duration::ZERO)
                    .as_secs(),
                stages: Vec::new(),
            },
        }
    }

    pub fn stage(&mut self, stage: &str, source: StageSource, elapsed: Duration) {
        self.run.stages.push(StageRecord {
            stage: stage.into(),
            source,
            millis: elapsed.as_millis() as u64,
        });
    }

    pub fn output(&mut self, file: &str, bytes: &[u8]) {
        self.outputs.push(OutputFile {
            file: file.into(),
            sha256: sha256_hex(bytes),
        });
        self.outputs.sort_by(|a, b| a.file.cmp(&b.file));
    }

    pub fn source_of(&self, stage: &str) -> Option<StageSource> {
        self.run
            .stages
            .iter()
            .find(|s| s.stage == stage)
            .map(|s| s.source)
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        let mut json = serde_json::to_vec_pretty(self).map_err(std::io::Error::other)?;
        json.push(b'\n');
        std::fs::write(dir.join(MANIFEST_FILE), json)
    }

    pub fn read(dir: &Path) -> anyhow::Result<Self> {
        let raw = std::fs::read(dir.join(MANIFEST_FILE))?;
        Ok(serde_json::from_slice(&raw)?)
    }
}
