use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SUMMARY_FILE: &str = "summary.json";

/// Everything needed to reproduce a run's outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub config: serde_json::Value,
    pub topology_sha256: Option<String>,
    pub master_seed: Option<u64>,
    pub outputs: Vec<String>,
}

/// Machine-readable run summary: experiment tag, config echo, aggregates.
#[derive(Debug, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub config: serde_json::Value,
    pub aggregates: serde_json::Value,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Collects output files under one directory and writes the manifest last.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> anyhow::Result<Self> {
        std::fs::create_dir_all(root)
            .with_context(|| format!("cannot create output directory {}", root.display()))?;
        Ok(Self {
            root: root.to_owned(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> anyhow::Result<PathBuf> {
        let path = self.root.join(name);
        std::fs::write(&path, contents)
            .with_context(|| format!("cannot write {}", path.display()))?;
        self.written.push(name.to_owned());
        Ok(path)
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> anyhow::Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text)
    }

    pub fn finish(
        mut self,
        command: &str,
        config: serde_json::Value,
        topology_sha256: Option<String>,
        master_seed: Option<u64>,
    ) -> anyhow::Result<PathBuf> {
        let manifest = RunManifest {
            command: command.to_owned(),
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            config,
            topology_sha256,
            master_seed,
            outputs: std::mem::take(&mut self.written),
        };
        self.write_json(MANIFEST_FILE, &manifest)
    }
}
