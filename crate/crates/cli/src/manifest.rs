//! Per-run provenance manifests.
//!
//! Every subcommand writes one manifest beside its primary output: the
//! resolved parameters (seeds included) plus a SHA-256 digest of each input
//! and output file. No timestamps or host details, so identical runs
//! produce identical manifests.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use skp_core::Result;

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub parameters: serde_json::Value,
    pub inputs: BTreeMap<String, FileDigest>,
    pub outputs: BTreeMap<String, FileDigest>,
}

impl RunManifest {
    pub fn new(command: &'static str, parameters: serde_json::Value) -> Self {
        RunManifest { command, parameters, inputs: BTreeMap::new(), outputs: BTreeMap::new() }
    }

    pub fn input(&mut self, role: &str, path: &Path) -> Result<()> {
        self.inputs.insert(role.to_string(), digest_entry(path)?);
        Ok(())
    }

    pub fn input_opt(&mut self, role: &str, path: Option<&Path>) -> Result<()> {
        match path {
            Some(p) => self.input(role, p),
            None => Ok(()),
        }
    }

    pub fn output(&mut self, role: &str, path: &Path) -> Result<()> {
        self.outputs.insert(role.to_string(), digest_entry(path)?);
        Ok(())
    }

    /// Writes `<primary stem>.manifest.json` next to the primary output.
    pub fn write_beside(&self, primary: &Path) -> Result<PathBuf> {
        let path = primary.with_extension("manifest.json");
        self.write_to(&path)?;
        Ok(path)
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        crate::write_json(path, self)
    }
}

pub fn digest_file(path: &Path) -> Result<String> {
    use std::io::Read;

    let mut file = File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    let digest = hasher.finalize();
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

fn digest_entry(path: &Path) -> Result<FileDigest> {
    Ok(FileDigest { path: path.display().to_string(), sha256: digest_file(path)? })
}
