//! Experiment configuration: a JSON-friendly schema with defaults, full
//! validation (all violations reported at once), and conversion to runtime
//! objects. Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::error::{GlilError, Result};
use crate::model::VolatilityInterval;
use crate::sim::VolatilityPolicy;

use super::schedule::{subsequence_schedule, ScheduleKind, SubsequenceSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalConfig {
    pub sigma_low: f64,
    pub sigma_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicyConfig {
    Constant {
        sigma: f64,
    },
    Piecewise {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    SignFeedback {
        sigma_positive: f64,
        sigma_negative: f64,
    },
    RegimeSwitching {
        rate: f64,
        values: Vec<f64>,
    },
}

impl PolicyConfig {
    pub fn build(&self, interval: &VolatilityInterval) -> Result<VolatilityPolicy> {
        match self {
            PolicyConfig::Constant { sigma } => VolatilityPolicy::constant(*sigma, interval),
            PolicyConfig::Piecewise {
                breakpoints,
                values,
            } => VolatilityPolicy::piecewise(breakpoints.clone(), values.clone(), interval),
            PolicyConfig::SignFeedback {
                sigma_positive,
                sigma_negative,
            } => VolatilityPolicy::sign_feedback(*sigma_positive, *sigma_negative, interval),
            PolicyConfig::RegimeSwitching { rate, values } => {
                VolatilityPolicy::regime_switching(*rate, values.clone(), interval)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// ζ sampling resolution on [0,1].
    pub out_points: usize,
    /// Node count m for the interpolant η and the α < 1/(2m) pairing.
    pub interp_m: usize,
    /// Simulation steps per unit time (integers stay on-grid).
    pub steps_per_unit: u32,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            out_points: 64,
            interp_m: 4,
            steps_per_unit: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetConfig {
    pub m: usize,
    pub levels: usize,
    pub max_paths: usize,
    pub radius_samples: usize,
}

impl Default for NetConfig {
    fn default() -> Self {
        NetConfig {
            m: 4,
            levels: 2,
            max_paths: 20_000,
            radius_samples: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct BetaConfig {
    /// Outer ball radius; defaults to σ̄.
    pub outer: Option<f64>,
    /// Inner (coverage) ball radius; defaults to σ̲.
    pub inner: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    /// Bisection tolerance for distances to K_β.
    pub distance_tol: f64,
    /// Blowup radius for the relative-compactness proxy (item I).
    pub epsilon: f64,
    /// Absolute outer-containment threshold for item II.
    pub outer_threshold: f64,
    /// Coverage terminal-median threshold per unit β (item III).
    pub coverage_median: f64,
    /// Window for the running max of |ζ(1)| per unit β (item IV).
    pub zeta1_window: [f64; 2],
    /// Minimum n_k entering outer/window statistics.
    pub min_n: f64,
    /// Per-policy pass requires this fraction of seeds to pass.
    pub seed_pass_fraction: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            distance_tol: 1e-3,
            epsilon: 0.35,
            outer_threshold: 0.35,
            coverage_median: 0.6,
            zeta1_window: [0.75, 1.05],
            min_n: 1e4,
            seed_pass_fraction: 0.9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeedConfig {
    /// Number of seeds derived from the effective base seed.
    pub count: usize,
    /// Explicit seed list; overrides `count` when present.
    pub list: Option<Vec<u64>>,
}

impl Default for SeedConfig {
    fn default() -> Self {
        SeedConfig {
            count: 1,
            list: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExamplesConfig {
    /// Statistics run to this horizon (integer times).
    pub n_max: u64,
    /// Weighted-sum exponents α (> −1) for f(t) = t^α.
    pub e41_alphas: Vec<f64>,
    /// Absolute-power exponents a (≥ 1).
    pub e42_exponents: Vec<f64>,
    /// Running maxima are tracked for n ≥ burn_in (loglog burn-in).
    pub burn_in: u64,
    /// Window factors on the limsup bound for the |S_n| running max.
    pub window_41: [f64; 2],
    /// Window factors on the limsup bound for the T_n running max.
    pub window_42: [f64; 2],
}

impl Default for ExamplesConfig {
    fn default() -> Self {
        ExamplesConfig {
            n_max: 1_000_000,
            e41_alphas: vec![0.0],
            e42_exponents: vec![2.0],
            burn_in: 100,
            window_41: [0.4, 1.3],
            window_42: [0.5, 1.3],
        }
    }
}

/// Full experiment configuration (the `lil`, `examples` and image runs all
/// consume this one schema).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub interval: IntervalConfig,
    pub policies: Vec<PolicyConfig>,
    pub schedule: ScheduleKind,
    #[serde(default = "default_horizon_cap")]
    pub horizon_cap: f64,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub net: NetConfig,
    #[serde(default)]
    pub betas: BetaConfig,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default)]
    pub seeds: SeedConfig,
    #[serde(default = "default_items")]
    pub items: Vec<String>,
    /// Config-file seed; overridden by the GLIL_SEED env var and --seed.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub examples: Option<ExamplesConfig>,
}

fn default_horizon_cap() -> f64 {
    1e7
}

fn default_items() -> Vec<String> {
    vec!["I".into(), "II".into(), "III".into(), "IV".into()]
}

/// Validated runtime objects derived from a config.
#[derive(Debug, Clone)]
pub struct Runtime {
    pub interval: VolatilityInterval,
    pub policies: Vec<(String, VolatilityPolicy)>,
    pub schedule: SubsequenceSchedule,
    pub beta_outer: f64,
    pub beta_inner: f64,
}

impl ExperimentConfig {
    /// Collects every violation instead of stopping at the first.
    pub fn validate(&self) -> std::result::Result<(), Vec<String>> {
        let mut errs = Vec::new();
        if !(self.interval.sigma_low > 0.0) {
            errs.push(format!(
                "interval.sigma_low: must be strictly positive, got {}",
                self.interval.sigma_low
            ));
        }
        if self.interval.sigma_low > self.interval.sigma_high {
            errs.push(format!(
                "interval.sigma_low: must not exceed sigma_high ({} > {})",
                self.interval.sigma_low, self.interval.sigma_high
            ));
        }
        if !self.interval.sigma_high.is_finite() || !self.interval.sigma_low.is_finite() {
            errs.push("interval: bounds must be finite".into());
        }
        if self.policies.is_empty() {
            errs.push("policies: at least one policy is required".into());
        }
        if let Ok(iv) = VolatilityInterval::new(self.interval.sigma_low, self.interval.sigma_high)
        {
            for (i, p) in self.policies.iter().enumerate() {
                if let Err(e) = p.build(&iv) {
                    errs.push(format!("policies[{i}]: {e}"));
                }
            }
        }
        match &self.schedule {
            ScheduleKind::Geometric { c, count, start_k } => {
                if !(*c > 1.0) {
                    errs.push(format!("schedule.c: geometric schedules require c > 1, got {c}"));
                }
                if *count == 0 {
                    errs.push("schedule.count: must be >= 1".into());
                }
                if *start_k == 0 {
                    errs.push("schedule.start_k: must be >= 1".into());
                }
            }
            ScheduleKind::Superpow { alpha, count } => {
                let limit = 1.0 / (2.0 * self.grid.interp_m.max(1) as f64);
                if !(*alpha > 0.0) || *alpha >= limit {
                    errs.push(format!(
                        "schedule.alpha: requires 0 < alpha < 1/(2m) = {limit} for interp_m = {}, got {alpha}",
                        self.grid.interp_m
                    ));
                }
                if *count == 0 {
                    errs.push("schedule.count: must be >= 1".into());
                }
            }
            ScheduleKind::Explicit { entries } => {
                if entries.is_empty() {
                    errs.push("schedule.entries: must be non-empty".into());
                } else if entries.windows(2).any(|w| w[1] <= w[0])
                    || entries[0] <= std::f64::consts::E
                {
                    errs.push(
                        "schedule.entries: must be strictly increasing with all entries > e"
                            .into(),
                    );
                }
            }
        }
        if !(self.horizon_cap > std::f64::consts::E) {
            errs.push(format!("horizon_cap: must exceed e, got {}", self.horizon_cap));
        }
        if self.grid.out_points < 2 {
            errs.push("grid.out_points: must be >= 2".into());
        }
        if self.grid.interp_m == 0 || !self.grid.out_points.is_multiple_of(self.grid.interp_m.max(1)) {
            errs.push(format!(
                "grid.interp_m: must divide out_points ({} % {} != 0)",
                self.grid.out_points, self.grid.interp_m
            ));
        }
        if self.grid.steps_per_unit == 0 {
            errs.push("grid.steps_per_unit: must be >= 1".into());
        }
        if self.net.m == 0 || self.net.levels == 0 {
            errs.push("net: m and levels must be >= 1".into());
        }
        if let Some(b) = self.betas.outer {
            if !(b > 0.0) {
                errs.push(format!("betas.outer: must be positive, got {b}"));
            }
        }
        if let Some(b) = self.betas.inner {
            if !(b >= 0.0) {
                errs.push(format!("betas.inner: must be >= 0, got {b}"));
            }
        }
        let t = &self.tolerances;
        if !(t.distance_tol > 0.0) {
            errs.push("tolerances.distance_tol: must be positive".into());
        }
        if t.zeta1_window[0] >= t.zeta1_window[1] {
            errs.push("tolerances.zeta1_window: lower bound must be below upper".into());
        }
        if !(t.seed_pass_fraction > 0.0 && t.seed_pass_fraction <= 1.0) {
            errs.push("tolerances.seed_pass_fraction: must be in (0, 1]".into());
        }
        if self.seeds.count == 0 && self.seeds.list.as_deref().is_none_or(|l| l.is_empty()) {
            errs.push("seeds: need count >= 1 or a non-empty list".into());
        }
        for item in &self.items {
            if !matches!(item.as_str(), "I" | "II" | "III" | "IV") {
                errs.push(format!("items: unknown item {item:?} (expected I..IV)"));
            }
        }
        if let Some(ex) = &self.examples {
            if ex.n_max <= ex.burn_in {
                errs.push(format!(
                    "examples.n_max: must exceed burn_in ({} <= {})",
                    ex.n_max, ex.burn_in
                ));
            }
            if ex.burn_in < 3 {
                errs.push("examples.burn_in: must be >= 3 (need n > e)".into());
            }
            for a in &ex.e41_alphas {
                if !(*a > -1.0) {
                    errs.push(format!("examples.e41_alphas: alpha must exceed -1, got {a}"));
                }
            }
            for a in &ex.e42_exponents {
                if !(*a >= 1.0) {
                    errs.push(format!("examples.e42_exponents: a must be >= 1, got {a}"));
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    /// Validates and builds runtime objects (interval, policies, schedule).
    pub fn to_runtime(&self) -> Result<Runtime> {
        self.validate()
            .map_err(|errs| GlilError::Config(errs.join("; ")))?;
        let interval = VolatilityInterval::new(self.interval.sigma_low, self.interval.sigma_high)?;
        let policies = self
            .policies
            .iter()
            .map(|p| p.build(&interval).map(|pol| (pol.label(), pol)))
            .collect::<Result<Vec<_>>>()?;
        let schedule =
            subsequence_schedule(&self.schedule, self.horizon_cap, Some(self.grid.interp_m))?;
        Ok(Runtime {
            interval,
            beta_outer: self.betas.outer.unwrap_or(interval.high()),
            beta_inner: self.betas.inner.unwrap_or(interval.low()),
            policies,
            schedule,
        })
    }

    /// Seeds for the experiment: the explicit list, or `count` consecutive
    /// seeds starting at the effective base seed.
    pub fn seeds_for(&self, base: u64) -> Vec<u64> {
        match &self.seeds.list {
            Some(list) if !list.is_empty() => list.clone(),
            _ => (0..self.seeds.count as u64).map(|i| base.wrapping_add(i)).collect(),
        }
    }

    /// Canonical sorted-key JSON of the config (seed field excluded) used
    /// for hashing.
    pub fn hash_input(&self) -> Result<String> {
        let mut value = serde_json::to_value(self)
            .map_err(|e| GlilError::Config(format!("config serialization failed: {e}")))?;
        if let Some(obj) = value.as_object_mut() {
            obj.remove("seed");
        }
        serde_json::to_string(&value)
            .map_err(|e| GlilError::Config(format!("config serialization failed: {e}")))
    }
}
