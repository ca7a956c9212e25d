// SPDX-License-Identifier: MIT OR Apache-2.0

//! Result bundles: one JSON report, any number of CSV tables, and a
//! manifest tying them to the config that produced them.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::atomic_write;
use super::config::{hash_text, RunConfig};
use crate::error::{CrhError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
    #[default]
    Both,
}

impl OutputFormat {
    fn json(self) -> bool {
        matches!(self, Self::Json | Self::Both)
    }
    fn csv(self) -> bool {
        matches!(self, Self::Csv | Self::Both)
    }
}

impl FromStr for OutputFormat {
    type Err = CrhError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "both" => Ok(Self::Both),
            _ => Err(CrhError::InvalidArgument(format!("unknown format {s:?}"))),
        }
    }
}

/// Formats a float with 17 significant digits, which round-trips every f64.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// A named CSV table; cells are preformatted strings.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Appends a row of floats.
    pub fn push_f64(&mut self, row: &[f64]) {
        self.push(row.iter().map(|x| fmt_f64(*x)).collect());
    }

    fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CrhError::Io(std::io::Error::other(e));
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.into_inner()
            .map_err(|e| CrhError::Io(std::io::Error::other(e.to_string())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_hash: String,
    /// The config exactly as hashed.
    pub config: String,
    pub seed: u64,
    pub format: OutputFormat,
    /// Header metadata carried over from ACTV1 inputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
    pub outputs: Vec<String>,
}

impl Manifest {
    /// True when the stored config re-hashes to the recorded hash.
    pub fn hash_matches(&self) -> bool {
        hash_text(&self.config) == self.config_hash
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| CrhError::Schema(format!("{}: {e}", path.display())))
    }
}

/// Output directory plus format selection.
#[derive(Debug, Clone)]
pub struct Bundle {
    dir: PathBuf,
    format: OutputFormat,
}

impl Bundle {
    pub fn new(dir: impl Into<PathBuf>, format: OutputFormat) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(Self { dir, format })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn format(&self) -> OutputFormat {
        self.format
    }

    /// Writes a raw auxiliary file (always, regardless of format).
    pub fn write_file(&self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        atomic_write(&path, |f| f.write_all(bytes))?;
        Ok(path)
    }

    /// Writes `<command>.json`, `<command>.<table>.csv`, any extra files
    /// already produced, and finally `<command>.manifest.json`.
    #[allow(clippy::too_many_arguments)]
    pub fn write<R: Serialize>(
        &self,
        command: &str,
        config: &RunConfig,
        report: &R,
        tables: &[CsvTable],
        extra_outputs: &[String],
        provenance: Option<serde_json::Value>,
    ) -> Result<Manifest> {
        let mut outputs = extra_outputs.to_vec();
        if self.format.json() || tables.is_empty() {
            let name = format!("{command}.json");
            let mut bytes = serde_json::to_vec_pretty(report)?;
            bytes.push(b'\n');
            self.write_file(&name, &bytes)?;
            outputs.push(name);
        }
        if self.format.csv() {
            for t in tables {
                let name = format!("{command}.{}.csv", t.name);
                self.write_file(&name, &t.to_bytes()?)?;
                outputs.push(name);
            }
        }
        let config_text = config.canonical_json();
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_hash: hash_text(&config_text),
            config: config_text,
            seed: config.seed(),
            format: self.format,
            provenance,
            outputs,
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest)?;
        bytes.push(b'\n');
        self.write_file(&format!("{command}.manifest.json"), &bytes)?;
        Ok(manifest)
    }
}
