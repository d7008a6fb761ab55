//! Subsequence schedules n_k for LIL experiments: geometric ⌊c^k⌋+1,
//! super-power k^{k^α}, or explicit lists. Entries are strictly increasing
//! and all exceed e; super-power entries are real and used as real rescale
//! parameters rather than rounded.

use serde::{Deserialize, Serialize};

use crate::error::{GlilError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleKind {
    /// n_k = ⌊c^k⌋ + 1 for k = start_k, start_k+1, …, requires c > 1.
    Geometric {
        c: f64,
        count: usize,
        #[serde(default = "default_start_k")]
        start_k: usize,
    },
    /// n_k = k^{k^α}; requires 0 < α < 1/(2m) for the configured
    /// interpolation resolution m (m = 1 when none is configured).
    Superpow { alpha: f64, count: usize },
    /// A hand-picked strictly increasing list of entries > e.
    Explicit { entries: Vec<f64> },
}

fn default_start_k() -> usize {
    1
}

/// A generated schedule; `truncated` is set when the horizon cap cut the
/// requested count short.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsequenceSchedule {
    pub entries: Vec<f64>,
    pub truncated: bool,
}

/// Generates the schedule, skipping entries ≤ e and duplicates, capping at
/// `horizon_cap`. For super-power schedules `interp_m` enforces α < 1/(2m).
pub fn subsequence_schedule(
    kind: &ScheduleKind,
    horizon_cap: f64,
    interp_m: Option<usize>,
) -> Result<SubsequenceSchedule> {
    if !(horizon_cap > std::f64::consts::E) {
        return Err(GlilError::Domain(format!(
            "horizon cap must exceed e, got {horizon_cap}"
        )));
    }
    match kind {
        ScheduleKind::Geometric { c, count, start_k } => {
            if !(*c > 1.0) {
                return Err(GlilError::Domain(format!(
                    "geometric schedule requires c > 1, got c = {c}"
                )));
            }
            if *count == 0 || *start_k == 0 {
                return Err(GlilError::Domain("count and start_k must be >= 1".into()));
            }
            let mut entries = Vec::with_capacity(*count);
            let mut truncated = false;
            let mut prev = 0.0f64;
            let mut k = *start_k as f64;
            while entries.len() < *count {
                let n = (c.powf(k)).floor() + 1.0;
                k += 1.0;
                if n > horizon_cap {
                    truncated = true;
                    break;
                }
                if n <= std::f64::consts::E || n <= prev {
                    continue;
                }
                entries.push(n);
                prev = n;
            }
            if entries.is_empty() {
                return Err(GlilError::Domain(
                    "geometric schedule produced no entries below the cap".into(),
                ));
            }
            Ok(SubsequenceSchedule { entries, truncated })
        }
        ScheduleKind::Superpow { alpha, count } => {
            let m = interp_m.unwrap_or(1).max(1);
            let limit = 1.0 / (2.0 * m as f64);
            if !(*alpha > 0.0) || *alpha >= limit {
                return Err(GlilError::Domain(format!(
                    "superpow schedule requires 0 < alpha < 1/(2m) = {limit}, got alpha = {alpha}"
                )));
            }
            if *count == 0 {
                return Err(GlilError::Domain("count must be >= 1".into()));
            }
            let mut entries = Vec::with_capacity(*count);
            let mut truncated = false;
            let mut prev = 0.0f64;
            let mut k = 1.0f64;
            while entries.len() < *count {
                let n = k.powf(k.powf(*alpha));
                k += 1.0;
                if n > horizon_cap {
                    truncated = true;
                    break;
                }
                if n <= std::f64::consts::E || n <= prev {
                    continue;
                }
                entries.push(n);
                prev = n;
            }
            if entries.is_empty() {
                return Err(GlilError::Domain(
                    "superpow schedule produced no entries below the cap".into(),
                ));
            }
            Ok(SubsequenceSchedule { entries, truncated })
        }
        ScheduleKind::Explicit { entries } => {
            if entries.is_empty() {
                return Err(GlilError::Domain("explicit schedule must be non-empty".into()));
            }
            if entries
                .windows(2)
                .any(|w| w[1] <= w[0])
                || entries[0] <= std::f64::consts::E
            {
                return Err(GlilError::Domain(
                    "explicit schedule must be strictly increasing with all entries > e".into(),
                ));
            }
            let kept: Vec<f64> = entries.iter().copied().filter(|&n| n <= horizon_cap).collect();
            let truncated = kept.len() < entries.len();
            if kept.is_empty() {
                return Err(GlilError::Domain("all explicit entries exceed the cap".into()));
            }
            Ok(SubsequenceSchedule {
                entries: kept,
                truncated,
            })
        }
    }
}
