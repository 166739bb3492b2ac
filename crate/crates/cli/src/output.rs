//! File emission: CSV and JSON with embedded config metadata.
//!
//! Every output starts with its schema version and the full producing
//! configuration, so a file is reproducible from its own header. CSV files
//! carry them as `# key=value` comment lines before the mandatory header
//! row; decimal points, no thousands separators, LF line endings. Floats
//! print in Rust's shortest round-trip form. Worker count is deliberately
//! not part of the config: results are independent of it.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

pub fn write_csv<C: Serialize>(
    path: &Path,
    schema: &str,
    config: &C,
    header: &str,
    rows: &[String],
) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut out = String::new();
    out.push_str("# schema=");
    out.push_str(schema);
    out.push('\n');
    out.push_str("# config=");
    out.push_str(&serde_json::to_string(config)?);
    out.push('\n');
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(row);
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
