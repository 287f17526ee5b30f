//! Artifact bookkeeping: every file a run writes is hashed into
//! `manifest.json`, and every artifact names the manifest's config hash.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::RunConfig;
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const TIMINGS_FILE: &str = "timings.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileRecord {
    pub name: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_hash: String,
    pub config: RunConfig,
    pub inputs: Vec<FileRecord>,
    pub outputs: Vec<FileRecord>,
    /// Companion file with wall-clock times, kept apart so that the
    /// manifest itself is reproducible.
    pub timings: String,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

/// Collects outputs of one run under `dir`.
pub struct ArtifactWriter {
    dir: PathBuf,
    config_hash: String,
    outputs: Vec<FileRecord>,
    inputs: Vec<FileRecord>,
    timings: BTreeMap<String, u128>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path, config_hash: &str) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            config_hash: config_hash.to_string(),
            outputs: Vec::new(),
            inputs: Vec::new(),
            timings: BTreeMap::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn config_hash(&self) -> &str {
        &self.config_hash
    }

    /// One-line comment heading every text artifact.
    pub fn header(&self) -> String {
        format!("# manifest={MANIFEST_FILE} config_hash={}", self.config_hash)
    }

    /// Writes a text artifact: the manifest header line, then `body`.
    pub fn text(&mut self, name: &str, body: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<PathBuf> {
        let mut buf = Vec::new();
        writeln!(buf, "{}", self.header())?;
        body(&mut buf)?;
        self.raw(name, &buf)
    }

    /// Writes `{"config_hash": ..., "result": value}` as pretty JSON.
    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        #[derive(Serialize)]
        struct Wrapped<'a, T> {
            manifest: &'a str,
            config_hash: &'a str,
            result: &'a T,
        }
        let w = Wrapped {
            manifest: MANIFEST_FILE,
            config_hash: &self.config_hash,
            result: value,
        };
        let mut buf = serde_json::to_vec_pretty(&w)?;
        buf.push(b'\n');
        self.raw(name, &buf)
    }

    fn raw(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, bytes)?;
        self.outputs.push(FileRecord {
            name: name.to_string(),
            path: name.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
        });
        Ok(path)
    }

    pub fn input(&mut self, name: &str, path: &Path) -> Result<()> {
        self.inputs.push(FileRecord {
            name: name.to_string(),
            path: path.display().to_string(),
            sha256: sha256_file(path)?,
        });
        Ok(())
    }

    pub fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t = Instant::now();
        let out = f();
        self.timings.insert(stage.to_string(), t.elapsed().as_millis());
        out
    }

    pub fn finish(self, config: &RunConfig) -> Result<RunManifest> {
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: config.command.name().to_string(),
            config_hash: self.config_hash,
            config: config.clone(),
            inputs: self.inputs,
            outputs: self.outputs,
            timings: TIMINGS_FILE.to_string(),
        };
        let mut buf = serde_json::to_vec_pretty(&manifest)?;
        buf.push(b'\n');
        fs::write(self.dir.join(MANIFEST_FILE), buf)?;
        let timings = serde_json::json!({
            "manifest": MANIFEST_FILE,
            "config_hash": manifest.config_hash,
            "timings_ms": self.timings,
        });
        fs::write(self.dir.join(TIMINGS_FILE), serde_json::to_vec_pretty(&timings)?)?;
        Ok(manifest)
    }
}

pub fn read_manifest(dir: &Path) -> Result<RunManifest> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

/// Outputs whose current hash differs from the recorded one.
pub fn verify_outputs(dir: &Path, manifest: &RunManifest) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    for o in &manifest.outputs {
        let p = dir.join(&o.path);
        if !p.exists() || sha256_file(&p)? != o.sha256 {
            bad.push(o.path.clone());
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::{Command, ConfigFile};

    #[test]
    fn manifest_records_hashes_and_verifies() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig::resolve(Command::Modes, ConfigFile::default()).unwrap();
        let mut w = ArtifactWriter::new(dir.path(), &cfg.hash()).unwrap();
        w.text("a.csv", |b| {
            writeln!(b, "x,y")?;
            Ok(())
        })
        .unwrap();
        w.json("b.json", &vec![1.0, 2.0]).unwrap();
        let m = w.finish(&cfg).unwrap();
        assert_eq!(m.outputs.len(), 2);
        let mut back = read_manifest(dir.path()).unwrap();
        // The output directory is not part of the recorded config.
        back.config.out = m.config.out.clone();
        assert_eq!(back, m);
        assert!(verify_outputs(dir.path(), &back).unwrap().is_empty());
        let text = fs::read_to_string(dir.path().join("a.csv")).unwrap();
        assert!(text.starts_with("# manifest=manifest.json config_hash="));
        fs::write(dir.path().join("a.csv"), "tampered").unwrap();
        assert_eq!(verify_outputs(dir.path(), &back).unwrap(), vec!["a.csv".to_string()]);
    }
}
