//! Atomic file output and run manifests.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{Map, Value};
use tempfile::NamedTempFile;

/// Write `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp =
        NamedTempFile::new_in(dir).with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Sibling path `<path><suffix>`, e.g. `out.csv.manifest.json`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Record of one run. Holds no timestamps, so identical runs give identical bytes.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub parameters: Map<String, Value>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            inputs: Vec::new(),
            seed: None,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            parameters: Map::new(),
            outputs: Vec::new(),
        }
    }

    pub fn input(mut self, path: &Path) -> Self {
        self.inputs.push(path.display().to_string());
        self
    }

    pub fn seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    /// Write every output atomically, then the manifest next to the first one.
    pub fn emit(mut self, outputs: &[(&Path, Vec<u8>)]) -> Result<PathBuf> {
        let first = outputs.first().context("no outputs to record")?.0;
        for (path, bytes) in outputs {
            write_atomic(path, bytes)?;
            self.outputs.push(path.display().to_string());
        }
        let manifest = sibling(first, ".manifest.json");
        let mut text = serde_json::to_string_pretty(&self)?;
        text.push('\n');
        write_atomic(&manifest, text.as_bytes())?;
        Ok(manifest)
    }
}
