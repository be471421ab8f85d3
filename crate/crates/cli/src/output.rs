//! Output plumbing: hashing writers and the run manifest.
//!
//! Every emitter writes through a [`HashingWriter`] so the manifest can list
//! each output with its sha256; equal manifests mean byte-identical reruns.

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

#[derive(Debug, Serialize)]
pub struct OutputEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// One run's provenance: what ran, over which inputs, and what came out.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub outputs: Vec<OutputEntry>,
}

impl RunManifest {
    pub fn new(subcommand: impl Into<String>) -> Self {
        RunManifest {
            tool: "kinspan",
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.into(),
            inputs: Vec::new(),
            dataset: None,
            seed: None,
            outputs: Vec::new(),
        }
    }

    pub fn record_file(&mut self, path: &Path) -> Result<()> {
        let mut file = File::open(path).with_context(|| format!("reopen {}", path.display()))?;
        let mut hasher = Sha256::new();
        let mut buf = [0u8; 64 * 1024];
        let mut bytes = 0u64;
        loop {
            let n = file.read(&mut buf)?;
            if n == 0 {
                break;
            }
            bytes += n as u64;
            hasher.update(&buf[..n]);
        }
        self.outputs.push(OutputEntry {
            path: path.display().to_string(),
            bytes,
            sha256: hex(&hasher.finalize()),
        });
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json + "\n").with_context(|| format!("write {}", path.display()))?;
        Ok(())
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Write-through sha256 wrapper.
pub struct HashingWriter<W: Write> {
    inner: W,
    hasher: Sha256,
    bytes: u64,
    label: String,
}

impl<W: Write> HashingWriter<W> {
    pub fn new(inner: W, label: impl Into<String>) -> Self {
        HashingWriter { inner, hasher: Sha256::new(), bytes: 0, label: label.into() }
    }

    pub fn finish(mut self, manifest: &mut RunManifest) -> Result<()> {
        self.inner.flush()?;
        manifest.outputs.push(OutputEntry {
            path: self.label,
            bytes: self.bytes,
            sha256: hex(&self.hasher.finalize()),
        });
        Ok(())
    }
}

impl<W: Write> Write for HashingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        self.bytes += n as u64;
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

/// `-` means stdin.
pub fn open_input(path: &str) -> Result<Box<dyn BufRead>> {
    if path == "-" {
        Ok(Box::new(BufReader::new(io::stdin())))
    } else {
        let file = File::open(path).with_context(|| format!("open {path}"))?;
        Ok(Box::new(BufReader::new(file)))
    }
}

/// Opens the primary output (stdout when absent) wrapped in a hashing writer.
pub fn open_output(path: Option<&PathBuf>) -> Result<HashingWriter<Box<dyn Write>>> {
    match path {
        None => Ok(HashingWriter::new(Box::new(BufWriter::new(io::stdout())), "-")),
        Some(p) => {
            let file = File::create(p).with_context(|| format!("create {}", p.display()))?;
            Ok(HashingWriter::new(
                Box::new(BufWriter::new(file)),
                p.display().to_string(),
            ))
        }
    }
}
