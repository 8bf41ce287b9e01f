//! Staged, atomic command output.
//!
//! Commands build every output in memory first, then commit: each file is
//! written to a temporary sibling and renamed into place, and the manifest
//! goes last. A failure while committing removes whatever was already
//! renamed, so a nonzero exit never leaves partial outputs behind.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;

pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

#[derive(Serialize)]
struct ArtifactRef {
    path: String,
    fnv1a_hash: String,
}

/// Reproducibility record written alongside every successful command.
#[derive(Serialize)]
struct RunManifest {
    command: String,
    config: BTreeMap<String, String>,
    seed: Option<u64>,
    inputs: Vec<ArtifactRef>,
    outputs: Vec<ArtifactRef>,
    duration_ms: u64,
}

pub struct OutputSet {
    command: String,
    config: BTreeMap<String, String>,
    seed: Option<u64>,
    inputs: Vec<ArtifactRef>,
    files: Vec<(PathBuf, Vec<u8>)>,
    started: Instant,
}

impl OutputSet {
    pub fn new(command: &str) -> Self {
        OutputSet {
            command: command.to_string(),
            config: BTreeMap::new(),
            seed: None,
            inputs: Vec::new(),
            files: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.seed = Some(seed);
        self
    }

    pub fn config<V: ToString>(&mut self, key: &str, value: V) -> &mut Self {
        self.config.insert(key.to_string(), value.to_string());
        self
    }

    /// Record an input file (hashed now, before any processing).
    pub fn input(&mut self, path: &Path) -> Result<&mut Self> {
        let bytes = std::fs::read(path)
            .with_context(|| format!("cannot read input {}", path.display()))?;
        self.inputs.push(ArtifactRef {
            path: path.display().to_string(),
            fnv1a_hash: format!("{:016x}", fnv1a(&bytes)),
        });
        Ok(self)
    }

    pub fn file(&mut self, path: PathBuf, bytes: Vec<u8>) -> &mut Self {
        self.files.push((path, bytes));
        self
    }

    /// Write everything atomically; the manifest lands at `manifest_path`.
    pub fn commit(self, manifest_path: &Path) -> Result<()> {
        let mut written: Vec<PathBuf> = Vec::new();
        let result = (|| -> Result<()> {
            let mut outputs = Vec::new();
            for (path, bytes) in &self.files {
                write_atomic(path, bytes)?;
                written.push(path.clone());
                outputs.push(ArtifactRef {
                    path: path.display().to_string(),
                    fnv1a_hash: format!("{:016x}", fnv1a(bytes)),
                });
            }
            let manifest = RunManifest {
                command: self.command.clone(),
                config: self.config.clone(),
                seed: self.seed,
                inputs: self.inputs,
                outputs,
                duration_ms: self.started.elapsed().as_millis() as u64,
            };
            let bytes = serde_json::to_vec_pretty(&manifest)?;
            write_atomic(manifest_path, &bytes)?;
            written.push(manifest_path.to_path_buf());
            Ok(())
        })();
        if result.is_err() {
            for path in written {
                let _ = std::fs::remove_file(path);
            }
        }
        result
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("cannot create directory {}", parent.display()))?;
        }
    }
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out")
    ));
    std::fs::write(&tmp, bytes)
        .with_context(|| format!("cannot write {}", tmp.display()))?;
    std::fs::rename(&tmp, path)
        .with_context(|| format!("cannot move {} into place", tmp.display()))?;
    Ok(())
}
