//! Experiment report objects with deterministic canonical serialization.
//!
//! Reports serialize through `serde_json::Value`, whose object maps are
//! ordered, so identical (config, seed) runs produce byte-identical JSON.
//! The wallclock field stays pinned to zero in the canonical form; callers
//! report measured timings on their diagnostic stream instead.

use serde::Serialize;
use serde_json::Value;

use crate::error::{GlilError, Result};

/// One named result with its numbers, tolerances, bounds and verdict.
#[derive(Debug, Clone, Serialize)]
pub struct ReportItem {
    pub name: String,
    pub values: Value,
    pub tolerances: Value,
    pub bounds: Value,
    pub pass: bool,
}

/// Aggregated experiment output: {config_hash, seed, items, wallclock_ms}.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub config_hash: String,
    pub seed: u64,
    pub items: Vec<ReportItem>,
    pub wallclock_ms: u64,
}

impl ExperimentReport {
    pub fn new(config_hash: impl Into<String>, seed: u64, items: Vec<ReportItem>) -> Self {
        ExperimentReport {
            config_hash: config_hash.into(),
            seed,
            items,
            wallclock_ms: 0,
        }
    }

    /// Sorted-key pretty JSON with a trailing newline.
    pub fn canonical_json(&self) -> Result<String> {
        let value = serde_json::to_value(self)
            .map_err(|e| GlilError::Config(format!("report serialization failed: {e}")))?;
        let mut out = serde_json::to_string_pretty(&value)
            .map_err(|e| GlilError::Config(format!("report serialization failed: {e}")))?;
        out.push('\n');
        Ok(out)
    }

    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }
}

/// One CSV record per (policy, seed, n_k); `metrics` columns are
/// name-mangled as item.metric.
#[derive(Debug, Clone)]
pub struct CsvRow {
    pub policy: String,
    pub seed: u64,
    pub n: f64,
    pub metrics: Vec<(String, f64)>,
}

/// Renders rows that share a metric layout into CSV text.
pub fn csv_text(rows: &[CsvRow]) -> Result<String> {
    let mut out = String::new();
    if rows.is_empty() {
        return Ok(out);
    }
    let header: Vec<&str> = rows[0].metrics.iter().map(|(k, _)| k.as_str()).collect();
    out.push_str("policy,seed,n_k");
    for h in &header {
        out.push(',');
        out.push_str(h);
    }
    out.push('\n');
    for row in rows {
        if row.metrics.len() != header.len()
            || row
                .metrics
                .iter()
                .zip(&header)
                .any(|((k, _), h)| k != h)
        {
            return Err(GlilError::Config("inconsistent CSV metric layout".into()));
        }
        out.push_str(&format!("{},{},{}", row.policy, row.seed, row.n));
        for (_, v) in &row.metrics {
            out.push(',');
            out.push_str(&format!("{v}"));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Serializes finite floats only; report values must never be NaN/inf.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        serde_json::json!(v)
    } else {
        Value::String(format!("{v}"))
    }
}

pub fn num_slice(vs: &[f64]) -> Value {
    Value::Array(vs.iter().map(|&v| num(v)).collect())
}
