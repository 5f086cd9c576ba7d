//! Output directory handling: data files, the resolved config and a manifest
//! with content hashes. Nothing time-dependent is recorded, so identical
//! inputs give byte-identical directories.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::Failure;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    seed: u64,
    config_sha256: String,
    versions: BTreeMap<&'static str, &'static str>,
    outputs: BTreeMap<String, String>,
}

pub struct RunOutput {
    dir: PathBuf,
    files: BTreeMap<String, Vec<u8>>,
}

impl RunOutput {
    pub fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            files: BTreeMap::new(),
        }
    }

    /// Buffers a CSV produced by `write` under `name`.
    pub fn csv<F, E>(&mut self, name: &str, write: F) -> Result<(), Failure>
    where
        F: FnOnce(&mut Vec<u8>) -> Result<(), E>,
        E: std::fmt::Display,
    {
        let mut buf = Vec::new();
        write(&mut buf).map_err(|e| Failure::runtime(format!("{name}: {e}")))?;
        self.files.insert(name.to_string(), buf);
        Ok(())
    }

    /// Writes the buffered files, `config.json` and `manifest.json`.
    pub fn finish(self, command: &str, cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, Failure> {
        let io = |p: &Path, e: std::io::Error| Failure::runtime(format!("{}: {e}", p.display()));
        fs::create_dir_all(&self.dir).map_err(|e| io(&self.dir, e))?;
        let mut config = serde_json::to_vec_pretty(cfg).expect("config serializes");
        config.push(b'\n');
        let manifest = Manifest {
            command,
            seed: cfg.seed,
            config_sha256: sha256_hex(&config),
            versions: BTreeMap::from([
                ("oncilla", env!("CARGO_PKG_VERSION")),
                ("oncilla-core", oncilla_core::VERSION),
            ]),
            outputs: self
                .files
                .iter()
                .map(|(k, v)| (k.clone(), sha256_hex(v)))
                .collect(),
        };
        let mut manifest = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
        manifest.push(b'\n');

        let mut written = Vec::new();
        let all = self
            .files
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_slice()))
            .chain([
                ("config.json", config.as_slice()),
                ("manifest.json", manifest.as_slice()),
            ]);
        for (name, bytes) in all {
            let path = self.dir.join(name);
            fs::write(&path, bytes).map_err(|e| io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}
