//! Deterministic CSV and JSON writers. Every file carries the tool version,
//! the hash of the resolved configuration and the quadrature settings.

use std::fs;
use std::path::{Path, PathBuf};

use radlab::QuadratureSpec;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance embedded in every output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_sha256: String,
    pub quadrature: QuadratureSpec,
    /// The resolved configuration the run used.
    pub config: Value,
}

impl Meta {
    /// The thread count is dropped from the resolved config: it never
    /// changes results, and outputs must not depend on it.
    pub fn new(command: &str, config: &RunConfig) -> Result<Self, CliError> {
        let mut resolved = config.clone();
        resolved.threads = None;
        let value = serde_json::to_value(&resolved).map_err(|e| CliError::config(e.to_string()))?;
        let canonical = serde_json::to_string(&value).map_err(|e| CliError::config(e.to_string()))?;
        let hash = hex::encode(Sha256::digest(canonical.as_bytes()));
        Ok(Self { tool: "radlab", version: VERSION, command: command.to_string(), config_sha256: hash, quadrature: config.quadrature(), config: value })
    }

    fn comment_lines(&self) -> String {
        let q = serde_json::to_string(&self.quadrature).expect("quadrature spec serializes");
        format!("# radlab {} {}\n# config_sha256={}\n# quadrature={}\n", self.version, self.command, self.config_sha256, q)
    }
}

/// Output directory that records what it wrote.
pub struct OutDir {
    root: PathBuf,
    pub written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    /// Writes a CSV with `#` provenance lines, a header row and LF endings.
    pub fn csv(&mut self, name: &str, meta: &Meta, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut buf = meta.comment_lines().into_bytes();
        {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut buf);
            w.write_record(header).map_err(csv_err)?;
            for r in rows {
                w.write_record(r).map_err(csv_err)?;
            }
            w.flush()?;
        }
        self.write(name, &buf)
    }

    /// Writes pretty JSON with sorted keys; `meta` is added under `"meta"`.
    pub fn json(&mut self, name: &str, meta: &Meta, body: &impl Serialize) -> Result<(), CliError> {
        let mut v = serde_json::to_value(body).map_err(|e| CliError::Check(e.to_string()))?;
        match &mut v {
            Value::Object(map) => {
                map.insert("meta".into(), serde_json::to_value(meta).map_err(|e| CliError::Check(e.to_string()))?);
            }
            _ => return Err(CliError::Check("JSON body must be an object".into())),
        }
        let mut text = serde_json::to_string_pretty(&v).map_err(|e| CliError::Check(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let p = self.root.join(name);
        fs::write(&p, bytes)?;
        self.written.push(p);
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e.to_string()))
}

/// Shortest round-trip decimal; empty for a missing value.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Whether `text` (a CSV or JSON output) carries version, config hash and
/// quadrature settings.
pub fn has_provenance(text: &str) -> bool {
    if text.trim_start().starts_with('{') {
        let Ok(v) = serde_json::from_str::<Value>(text) else { return false };
        let m = &v["meta"];
        m["version"].is_string() && m["config_sha256"].as_str().is_some_and(|h| h.len() == 64) && m["quadrature"].is_object()
    } else {
        let mut lines = text.lines();
        let first = lines.next().unwrap_or("");
        let second = lines.next().unwrap_or("");
        let third = lines.next().unwrap_or("");
        first.starts_with(&format!("# radlab {VERSION}")) && second.starts_with("# config_sha256=") && second.len() == 16 + 64 && third.starts_with("# quadrature={")
    }
}
