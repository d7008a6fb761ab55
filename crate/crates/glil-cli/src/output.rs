//! Report hashing and file output.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use glil::harness::{csv_text, CsvRow, ExperimentConfig, ExperimentReport};

use crate::error::CliError;

/// SHA-256 over the canonical (sorted-key, seed-stripped) config JSON.
pub fn config_hash(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let canonical = cfg
        .hash_input()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let digest = Sha256::digest(canonical.as_bytes());
    Ok(hex::encode(digest))
}

pub fn ensure_outdir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Input(format!("output directory {}: {e}", dir.display())))
}

pub fn write_report(
    dir: &Path,
    stem: &str,
    report: &ExperimentReport,
    rows: &[CsvRow],
) -> Result<(PathBuf, Option<PathBuf>), CliError> {
    ensure_outdir(dir)?;
    let json_path = dir.join(format!("{stem}.json"));
    let json = report
        .canonical_json()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    fs::write(&json_path, json)
        .map_err(|e| CliError::Internal(format!("writing {}: {e}", json_path.display())))?;
    let csv_path = if rows.is_empty() {
        None
    } else {
        let path = dir.join(format!("{stem}.csv"));
        let text = csv_text(rows).map_err(|e| CliError::Internal(e.to_string()))?;
        fs::write(&path, text)
            .map_err(|e| CliError::Internal(format!("writing {}: {e}", path.display())))?;
        Some(path)
    };
    Ok((json_path, csv_path))
}
