use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use transducer::config::Config;

/// 12 significant digits.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        x.to_string()
    }
}

/// Writes a header and rows of numbers, returning the file name relative to the run directory.
pub fn write_table(dir: &Path, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let path = dir.join(name);
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(name.to_string())
}

pub fn write_text(dir: &Path, name: &str, body: &str) -> Result<String> {
    let path = dir.join(name);
    fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    Ok(name.to_string())
}

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: u64,
}

/// Run manifest written next to the outputs as `manifest.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub command: String,
    pub version: String,
    pub timestamp: String,
    pub seed: u64,
    pub config: Config,
    pub files: Vec<FileEntry>,
    pub summary: serde_json::Map<String, serde_json::Value>,
}

impl RunRecord {
    pub fn new(command: &str, config: &Config, seed: u64) -> Self {
        RunRecord {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            seed,
            config: config.clone(),
            files: Vec::new(),
            summary: serde_json::Map::new(),
        }
    }

    pub fn note(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    /// Lists every emitted file and writes the manifest itself.
    pub fn finish(mut self, dir: &Path, files: Vec<String>) -> Result<PathBuf> {
        for name in files {
            let bytes = fs::metadata(dir.join(&name))
                .with_context(|| format!("stat {name}"))?
                .len();
            self.files.push(FileEntry { name, bytes });
        }
        let path = dir.join("manifest.json");
        fs::write(&path, serde_json::to_string_pretty(&self)? + "\n")?;
        Ok(path)
    }
}
