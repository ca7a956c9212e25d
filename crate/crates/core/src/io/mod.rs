// SPDX-License-Identifier: MIT OR Apache-2.0

//! File formats, run configuration, and result bundles.

mod actv;
mod bundle;
mod config;

use std::fs::File;
use std::path::Path;

pub use actv::{decode_actv, encode_actv, read_actv, write_actv, ActvFile, ActvHeader, Role, MAGIC};
pub use bundle::{fmt_f64, Bundle, CsvTable, Manifest, OutputFormat};
pub use config::{
    Implication1Section, Implication2Section, Implication3Section, IoSection, LambdaTable, ModelFamily, RunConfig,
    Scheme, SchemeFactors, SteeringSection, TheorySection, SCHEMA,
};

use crate::error::{CrhError, Result};

/// Writes through a sibling temp file, fsyncs, then renames over `path`.
pub fn atomic_write<F>(path: &Path, fill: F) -> Result<()>
where
    F: FnOnce(&mut File) -> std::io::Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    fill(tmp.as_file_mut())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CrhError::Io(e.error))?;
    Ok(())
}
