//! Output directory handling and the run manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use cjl_core::export::{csv_table, json_string};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{Format, RunConfig};
use crate::CliError;

#[derive(Debug, Clone)]
pub struct FileRecord {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Collects written files under one root; the manifest goes in last.
pub struct OutputDir {
    root: PathBuf,
    files: Vec<FileRecord>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root).map_err(|e| io_err(root, e))?;
        Ok(Self { root: root.to_path_buf(), files: Vec::new() })
    }

    pub fn write(&mut self, rel: &str, contents: &str) -> Result<(), CliError> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
        }
        std::fs::write(&path, contents).map_err(|e| io_err(&path, e))?;
        self.files.push(FileRecord {
            path: rel.to_string(),
            sha256: hex(&Sha256::digest(contents.as_bytes())),
            bytes: contents.len(),
        });
        Ok(())
    }

    pub fn write_json(&mut self, rel: &str, value: &Value) -> Result<(), CliError> {
        self.write(rel, &json_string(value))
    }

    /// A table as `<stem>.csv` or `<stem>.json` (object of columns).
    pub fn write_table(&mut self, stem: &str, format: Format, header: &[&str], columns: &[&[f64]]) -> Result<(), CliError> {
        match format {
            Format::Csv => self.write(&format!("{stem}.csv"), &csv_table(header, columns)),
            Format::Json => {
                let obj: serde_json::Map<String, Value> =
                    header.iter().zip(columns).map(|(h, c)| (h.to_string(), json!(c))).collect();
                self.write_json(&format!("{stem}.json"), &Value::Object(obj))
            }
        }
    }

    pub fn absorb(&mut self, files: Vec<FileRecord>) {
        self.files.extend(files);
    }

    pub fn into_records(self) -> Vec<FileRecord> {
        self.files
    }

    pub fn finish(mut self, cfg: &RunConfig, started: Instant, summary: Value) -> Result<(), CliError> {
        self.files.sort_by(|a, b| a.path.cmp(&b.path));
        let files: Vec<Value> = self
            .files
            .iter()
            .map(|f| json!({ "path": f.path, "sha256": f.sha256, "bytes": f.bytes }))
            .collect();
        let manifest = json!({
            "tool": "cjl",
            "version": env!("CARGO_PKG_VERSION"),
            "config": cfg,
            "wall_time_s": started.elapsed().as_secs_f64(),
            "files": files,
            "summary": summary,
        });
        let path = self.root.join("manifest.json");
        std::fs::write(&path, json_string(&manifest)).map_err(|e| io_err(&path, e))
    }
}
