//! Output directory handling and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileRecord {
    /// Path relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub experiment: String,
    pub code_version: String,
    pub seed: u64,
    pub config: BTreeMap<String, String>,
    pub files: Vec<FileRecord>,
    pub warnings: Vec<String>,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn load(dir: &Path) -> Result<Self> {
        let text = fs::read_to_string(dir.join(MANIFEST_NAME))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Recompute every checksum; returns the paths that no longer match.
    pub fn verify(&self, dir: &Path) -> Result<Vec<String>> {
        let mut stale = Vec::new();
        for f in &self.files {
            let bytes = fs::read(dir.join(&f.path))?;
            if sha256_hex(&bytes) != f.sha256 {
                stale.push(f.path.clone());
            }
        }
        Ok(stale)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects the files of one run and writes the manifest last.
pub(crate) struct OutputDir {
    root: PathBuf,
    overwrite: bool,
    files: Vec<FileRecord>,
    warnings: Vec<String>,
    started: Instant,
}

impl OutputDir {
    /// Refuses a directory that already holds a manifest unless
    /// `config.overwrite` is set.
    pub fn prepare(config: &ExperimentConfig) -> Result<Self> {
        let root = config.out.clone();
        let manifest = root.join(MANIFEST_NAME);
        if manifest.exists() && !config.overwrite {
            return Err(Error::OutputExists(manifest));
        }
        fs::create_dir_all(&root)?;
        Ok(Self {
            root,
            overwrite: config.overwrite,
            files: Vec::new(),
            warnings: Vec::new(),
            started: Instant::now(),
        })
    }

    pub fn warn(&mut self, message: String) {
        self.warnings.push(message);
    }

    /// Write `name` through `fill` and record its checksum.
    pub fn write<F>(&mut self, name: &str, fill: F) -> Result<()>
    where
        F: FnOnce(&mut dyn Write) -> Result<()>,
    {
        let path = self.root.join(name);
        if path.exists() && !self.overwrite {
            return Err(Error::OutputExists(path));
        }
        let mut buf = Vec::new();
        fill(&mut buf)?;
        let mut file = BufWriter::new(fs::File::create(&path)?);
        file.write_all(&buf)?;
        file.flush()?;
        self.files.push(FileRecord {
            path: name.to_string(),
            sha256: sha256_hex(&buf),
            bytes: buf.len() as u64,
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)?;
            Ok(())
        })
    }

    pub fn finish(self, config: &ExperimentConfig) -> Result<RunManifest> {
        let manifest = RunManifest {
            experiment: config.experiment.to_string(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
            config: config
                .pairs()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            files: self.files,
            warnings: self.warnings,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
        };
        let text = serde_json::to_string_pretty(&manifest)?;
        fs::write(self.root.join(MANIFEST_NAME), text + "\n")?;
        Ok(manifest)
    }
}
