use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use mfdft::operator::OpCountReport;
use serde::Serialize;
use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

/// Collects output files and commits them together. Nothing becomes visible
/// at its final path until [`OutputSet::commit`], and dropping an uncommitted
/// set removes the temporaries.
pub struct OutputSet {
    staged: Vec<(NamedTempFile, PathBuf)>,
}

impl OutputSet {
    pub fn new() -> Self {
        Self { staged: Vec::new() }
    }

    pub fn stage(&mut self, path: impl AsRef<Path>, contents: &[u8]) -> Result<()> {
        let path = path.as_ref().to_path_buf();
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut tmp = NamedTempFile::new_in(&dir).with_context(|| format!("staging {}", path.display()))?;
        tmp.write_all(contents)?;
        tmp.flush()?;
        self.staged.push((tmp, path));
        Ok(())
    }

    pub fn paths(&self) -> Vec<String> {
        self.staged.iter().map(|(_, p)| p.display().to_string()).collect()
    }

    pub fn commit(self) -> Result<Vec<PathBuf>> {
        let mut done = Vec::new();
        for (tmp, path) in self.staged {
            tmp.persist(&path).with_context(|| format!("writing {}", path.display()))?;
            done.push(path);
        }
        Ok(done)
    }
}

pub fn prefixed(prefix: &str, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}.{suffix}"))
}

/// Side-car metadata written next to every set of outputs. CSV files stay
/// free of run-specific data so reruns are byte-identical.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: String,
    pub args: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario_hash: Option<String>,
    pub seeds: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kf: Option<f64>,
    pub started_unix_s: u64,
    pub finished_unix_s: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub op_counts: Option<OpCountReport>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            tool_version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            args: std::env::args().skip(1).collect(),
            scenario_hash: None,
            seeds: Vec::new(),
            variant: None,
            kf: None,
            started_unix_s: unix_now(),
            finished_unix_s: 0,
            op_counts: None,
            outputs: Vec::new(),
        }
    }

    pub fn finish(mut self, set: &mut OutputSet, prefix: &str) -> Result<()> {
        let path = prefixed(prefix, "manifest.json");
        self.outputs = set.paths();
        self.finished_unix_s = unix_now();
        let text = serde_json::to_string_pretty(&self)?;
        set.stage(path, text.as_bytes())
    }
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `20·log10(v / reference)`, capped at the library's floor for zero cells.
pub fn to_db(v: f64, reference: f64) -> f64 {
    if v <= 0.0 || reference <= 0.0 {
        return mfdft::detection::DB_FLOOR_CAP;
    }
    (20.0 * (v / reference).log10()).max(mfdft::detection::DB_FLOOR_CAP)
}

/// Minimal CSV builder: header row, comma separator, `.` decimals.
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = header.join(",");
        buf.push('\n');
        Self { buf }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: std::fmt::Display,
    {
        let mut first = true;
        for f in fields {
            if !first {
                self.buf.push(',');
            }
            first = false;
            let text = f.to_string();
            if text.contains([',', '"', '\n']) {
                self.buf.push('"');
                self.buf.push_str(&text.replace('"', "\"\""));
                self.buf.push('"');
            } else {
                self.buf.push_str(&text);
            }
        }
        self.buf.push('\n');
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf.into_bytes()
    }

    pub fn as_str(&self) -> &str {
        &self.buf
    }
}
