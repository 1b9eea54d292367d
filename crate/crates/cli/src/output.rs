//! Output directory of one run and its manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

pub struct RunDir {
    root: PathBuf,
    outputs: Vec<OutputRecord>,
    started: Instant,
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    command: &'a str,
    version: &'a str,
    library_version: &'a str,
    seed: u64,
    threads: Option<usize>,
    config: &'a C,
    wall_time_seconds: f64,
    outputs: &'a [OutputRecord],
}

impl RunDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            outputs: Vec::new(),
            started: Instant::now(),
        })
    }

    /// Renders an artifact in memory, then writes and hashes it.
    pub fn write(
        &mut self,
        name: &str,
        render: impl FnOnce(&mut Vec<u8>) -> bifurlab::Result<()>,
    ) -> Result<(), CliError> {
        let mut buf = Vec::new();
        render(&mut buf)?;
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, &buf)?;
        self.outputs.push(OutputRecord {
            path: name.to_string(),
            sha256: hex(&Sha256::digest(&buf)),
            bytes: buf.len(),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        self.write(name, |buf| {
            serde_json::to_writer_pretty(&mut *buf, value).map_err(|e| bifurlab::Error::Io(e.to_string()))?;
            buf.push(b'\n');
            Ok(())
        })
    }

    pub fn finish<C: Serialize>(self, command: &str, seed: u64, threads: Option<usize>, config: &C) -> Result<(), CliError> {
        let manifest = Manifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            library_version: bifurlab::VERSION,
            seed,
            threads,
            config,
            wall_time_seconds: self.started.elapsed().as_secs_f64(),
            outputs: &self.outputs,
        };
        let mut text = serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::Usage(e.to_string()))?;
        text.push(b'\n');
        std::fs::write(self.root.join("manifest.json"), text)?;
        Ok(())
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
