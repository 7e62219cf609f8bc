use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

pub const MANIFEST_FORMAT: &str = "nsestat-manifest/1";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Path relative to the output directory.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

impl FileEntry {
    pub fn new(path: &str, bytes: &[u8]) -> Self {
        FileEntry {
            path: path.to_string(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(bytes),
        }
    }
}

/// Wall-clock bounds of a run, in seconds since the Unix epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timestamps {
    pub started: f64,
    pub finished: f64,
}

pub fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Provenance record of one `run`.
///
/// Everything except `timestamps` is a function of the config bytes and
/// the code version; the inventory hashes let a second run be compared
/// file by file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format: String,
    pub name: String,
    pub config_sha256: String,
    pub code_version: String,
    pub timestamps: Timestamps,
    pub files: Vec<FileEntry>,
}

impl RunManifest {
    pub fn new(name: &str, config_bytes: &[u8], started: f64) -> Self {
        RunManifest {
            format: MANIFEST_FORMAT.into(),
            name: name.to_string(),
            config_sha256: sha256_hex(config_bytes),
            code_version: concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")).into(),
            timestamps: Timestamps {
                started,
                finished: started,
            },
            files: Vec::new(),
        }
    }

    pub fn record(&mut self, path: &str, bytes: &[u8]) {
        self.files.push(FileEntry::new(path, bytes));
    }

    /// Deterministic part of the manifest: everything but the timestamps.
    pub fn fingerprint(&self) -> (String, String, String, Vec<FileEntry>) {
        (
            self.name.clone(),
            self.config_sha256.clone(),
            self.code_version.clone(),
            self.files.clone(),
        )
    }

    /// Rehashes the inventory against the files under `dir`; returns the
    /// paths whose size or digest differs or that cannot be read.
    pub fn stale_files(&self, dir: &Path) -> Vec<String> {
        self.files
            .iter()
            .filter(|e| match std::fs::read(dir.join(&e.path)) {
                Ok(b) => FileEntry::new(&e.path, &b) != **e,
                Err(_) => true,
            })
            .map(|e| e.path.clone())
            .collect()
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = super::format::read_file(path)?;
        Ok(serde_json::from_slice(&bytes)?)
    }
}
