//! Run manifests, written last and atomically.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::report::RegularityReport;
use crate::{LabError, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Converged,
    /// Newton stopped short; the best iterate was stored.
    NotConverged,
    /// Relaxation blew up; nothing was stored.
    Diverged,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub run_index: usize,
    pub seed: u64,
    /// Relative to the manifest's directory.
    pub dir: String,
    pub files: Vec<String>,
    pub wall_seconds: f64,
    pub status: RunStatus,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<RegularityReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_hash: String,
    pub config: RunConfig,
    pub generator: String,
    pub threads: usize,
    pub warnings: Vec<String>,
    pub runs: Vec<RunEntry>,
    /// Files outside the run directories, relative to the manifest.
    pub files: Vec<String>,
    pub total_seconds: f64,
    pub all_converged: bool,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = fs::read_to_string(path)
            .map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))
    }
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), LabError> {
    let name = path
        .file_name()
        .ok_or_else(|| LabError::Io(format!("{} has no file name", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, bytes).map_err(|e| LabError::Io(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), LabError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| LabError::Io(format!("encoding {}: {e}", path.display())))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}
