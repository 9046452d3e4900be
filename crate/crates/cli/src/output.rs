//! Output directory bookkeeping, CSV formatting and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Full-precision CSV number.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Like [`num`], with an empty field for a missing value.
pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Joins rows into CSV text with a trailing newline.
pub fn csv(header: &str, rows: &[String]) -> String {
    let mut s = String::with_capacity(header.len() + 1 + rows.iter().map(|r| r.len() + 1).sum::<usize>());
    s.push_str(header);
    s.push('\n');
    for r in rows {
        s.push_str(r);
        s.push('\n');
    }
    s
}

/// Files written under one output root, in write order.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    pub fn write(&mut self, rel: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.path(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.record(rel);
        Ok(path)
    }

    /// Registers a file written by someone else (a sweep worker).
    pub fn record(&mut self, rel: &str) {
        let rel = PathBuf::from(rel);
        if !self.written.contains(&rel) {
            self.written.push(rel);
        }
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn write_manifest(&mut self, config: BTreeMap<String, String>, wall_clock_seconds: f64) -> Result<PathBuf, CliError> {
        let mut files = Vec::with_capacity(self.written.len());
        let mut rels = self.written.clone();
        rels.sort();
        for rel in rels {
            let path = self.root.join(&rel);
            let bytes = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
            files.push(FileEntry {
                path: rel.to_string_lossy().replace('\\', "/"),
                bytes: bytes.len() as u64,
                sha256: hex(&Sha256::digest(&bytes)),
            });
        }
        let manifest = Manifest { tool: "tricrystal", version: env!("CARGO_PKG_VERSION"), config, wall_clock_seconds, files };
        let text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| CliError::io(self.path("manifest.json"), std::io::Error::other(e)))?;
        self.write("manifest.json", &(text + "\n"))
    }
}

#[derive(Debug, Serialize)]
struct FileEntry {
    path: String,
    bytes: u64,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    config: BTreeMap<String, String>,
    wall_clock_seconds: f64,
    files: Vec<FileEntry>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_full_precision() {
        let x = 0.1f64 + 0.2;
        assert_eq!(num(x).parse::<f64>().unwrap(), x);
        assert_eq!(opt_num(None), "");
    }

    #[test]
    fn manifest_lists_hashes() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path()).unwrap();
        out.write("a.csv", "abc").unwrap();
        out.write_manifest(BTreeMap::new(), 0.5).unwrap();
        let text = fs::read_to_string(dir.path().join("manifest.json")).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["files"][0]["path"], "a.csv");
        assert_eq!(v["files"][0]["bytes"], 3);
        assert_eq!(
            v["files"][0]["sha256"],
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
