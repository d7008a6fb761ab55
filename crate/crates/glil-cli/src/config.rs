//! Config file loading: parse errors carry line/column, validation errors
//! list every violation.

use std::fs;
use std::path::Path;

use glil::harness::ExperimentConfig;

use crate::error::CliError;

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))?;
    let cfg: ExperimentConfig = serde_json::from_str(&text).map_err(|e| {
        CliError::Input(format!(
            "config {}: parse error at line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;
    cfg.validate().map_err(|errs| {
        CliError::Input(format!(
            "config {}: {} violation(s):\n  - {}",
            path.display(),
            errs.len(),
            errs.join("\n  - ")
        ))
    })?;
    Ok(cfg)
}

/// Seed precedence: --seed flag > GLIL_SEED env > config file > 42.
pub fn effective_seed(flag: Option<u64>, config_seed: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Ok(v) = std::env::var("GLIL_SEED") {
        return v
            .trim()
            .parse::<u64>()
            .map_err(|e| CliError::Input(format!("GLIL_SEED {v:?}: {e}")));
    }
    Ok(config_seed.unwrap_or(42))
}
