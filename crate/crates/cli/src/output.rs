use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use bolab::spectral::{write_field, Endianness, Field};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Directory that records every file written into it.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    artifacts: Vec<Artifact>,
}

impl OutputDir {
    pub fn create(root: impl AsRef<Path>) -> Result<Self> {
        fs::create_dir_all(root.as_ref())?;
        Ok(OutputDir { root: root.as_ref().to_path_buf(), artifacts: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn artifacts(&self) -> &[Artifact] {
        &self.artifacts
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(name);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(&path, bytes)?;
        self.artifacts.push(Artifact {
            path: name.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
            bytes: bytes.len(),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write_bytes(name, &bytes)
    }

    pub fn write_csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in rows {
            w.serialize(row)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        self.write_bytes(name, &bytes)
    }

    /// Writes `name.csv` with `(x, u)` rows and `name.bin` in the binary container.
    pub fn write_field(&mut self, name: &str, field: &Field) -> Result<()> {
        let mut csv = Vec::new();
        bolab::spectral::write_field_csv(&mut csv, field)?;
        self.write_bytes(&format!("{name}.csv"), &csv)?;
        let mut bin = Vec::new();
        write_field(&mut bin, field, Endianness::Little)?;
        self.write_bytes(&format!("{name}.bin"), &bin)
    }

    /// Appends one manifest line to `manifests.jsonl`.
    pub fn append_manifest(&self, manifest: &RunManifest) -> Result<()> {
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.root.join("manifests.jsonl"))?;
        let mut line = serde_json::to_vec(manifest)?;
        line.push(b'\n');
        f.write_all(&line)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridParams {
    pub n: usize,
    pub half_length: f64,
    pub dx: f64,
}

impl From<&bolab::spectral::Grid> for GridParams {
    fn from(g: &bolab::spectral::Grid) -> Self {
        GridParams { n: g.n(), half_length: g.half_length(), dx: g.dx() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub artifact_version: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub grids: Vec<GridParams>,
    pub convention: Option<serde_json::Value>,
    pub outputs: Vec<Artifact>,
    pub steps: u64,
    pub timings: Vec<crate::Check>,
    pub pass: bool,
    pub exit_code: i32,
    pub started_unix: u64,
    pub wall_clock_s: f64,
}
