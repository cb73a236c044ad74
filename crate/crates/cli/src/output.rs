//! Deterministic artifact output: CSV sweeps, JSON reports, content hashes,
//! and atomic writes.

use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Writes bytes to `path` atomically (temp file + rename).
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::Config(format!("cannot create {parent:?}: {e}")))?;
        }
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(|e| CliError::Config(format!("cannot write {tmp:?}: {e}")))?;
    fs::rename(&tmp, path)
        .map_err(|e| CliError::Config(format!("cannot rename into {path:?}: {e}")))?;
    Ok(())
}

/// Serializes a sweep as `epsilon,value` rows with 17 significant digits
/// and LF line endings, epsilon ascending.
pub fn sweep_csv(rows: &[(f64, f64)]) -> String {
    let mut sorted = rows.to_vec();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut out = String::from("epsilon,value\n");
    for (e, v) in sorted {
        out.push_str(&format!("{e:.16e},{v:.16e}\n"));
    }
    out
}

/// Parses a sweep written by [`sweep_csv`].
pub fn read_sweep_csv(text: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let mut lines = text.lines();
    match lines.next() {
        Some("epsilon,value") => {}
        other => {
            return Err(CliError::Config(format!(
                "bad sweep header: {other:?}"
            )))
        }
    }
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let e = parts
            .next()
            .and_then(|s| s.parse::<f64>().ok())
            .ok_or_else(|| CliError::Config(format!("bad epsilon on row {}", k + 2)))?;
        let v = parts
            .next()
            .and_then(|s| s.parse::<f64>().ok())
            .ok_or_else(|| CliError::Config(format!("bad value on row {}", k + 2)))?;
        if parts.next().is_some() {
            return Err(CliError::Config(format!("extra column on row {}", k + 2)));
        }
        rows.push((e, v));
    }
    Ok(rows)
}

/// Content hash of the run inputs: hex SHA-256 over the raw config bytes
/// and the effective seed override.
pub fn content_hash(config_bytes: &[u8], seed_override: Option<u64>) -> String {
    let mut hasher = Sha256::new();
    hasher.update(config_bytes);
    if let Some(seed) = seed_override {
        hasher.update(b"seed-override");
        hasher.update(seed.to_le_bytes());
    }
    hex::encode(hasher.finalize())
}

/// Writes a pretty-printed JSON document (with trailing newline).
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("serialization: {e}")))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}
