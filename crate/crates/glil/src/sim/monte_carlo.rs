//! Monte Carlo upper expectations and capacity bounds over finite
//! policy families, with common random numbers across policies.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{GlilError, Result};
use crate::model::{SamplePath, TestFunction, TimeGrid, VolatilityInterval};

use super::paths::simulate_path;
use super::policy::{path_seed, VolatilityPolicy};

/// A non-empty list of policies, all respecting one volatility interval.
#[derive(Debug, Clone)]
pub struct PolicyFamily {
    policies: Vec<VolatilityPolicy>,
}

impl PolicyFamily {
    pub fn new(policies: Vec<VolatilityPolicy>, interval: &VolatilityInterval) -> Result<Self> {
        if policies.is_empty() {
            return Err(GlilError::Domain("policy family must be non-empty".into()));
        }
        for p in &policies {
            if !p.respects(interval) {
                return Err(GlilError::Domain(format!(
                    "policy {} does not respect the interval",
                    p.label()
                )));
            }
        }
        Ok(PolicyFamily { policies })
    }

    pub fn policies(&self) -> &[VolatilityPolicy] {
        &self.policies
    }

    pub fn len(&self) -> usize {
        self.policies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.policies.is_empty()
    }
}

/// Functional applied to a simulated path.
#[derive(Clone)]
pub enum PathFunctional {
    /// φ(X_T) for the terminal value.
    Terminal(TestFunction),
    /// sup_k |X_{t_k}|.
    SupAbs,
    /// Arbitrary functional of the whole path.
    Custom(Arc<dyn Fn(&SamplePath) -> f64 + Send + Sync>),
}

impl fmt::Debug for PathFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathFunctional::Terminal(t) => write!(f, "Terminal({t:?})"),
            PathFunctional::SupAbs => write!(f, "SupAbs"),
            PathFunctional::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl PathFunctional {
    pub fn eval(&self, path: &SamplePath) -> f64 {
        match self {
            PathFunctional::Terminal(phi) => phi.eval(*path.values().last().unwrap()),
            PathFunctional::SupAbs => path.values().iter().fold(0.0, |m, v| m.max(v.abs())),
            PathFunctional::Custom(f) => f(path),
        }
    }
}

/// Measurable event on sample paths.
#[derive(Clone)]
pub enum PathEvent {
    /// |X_T| ≥ level.
    TerminalAbsGeq { level: f64 },
    /// X_T ≤ level.
    TerminalLeq { level: f64 },
    /// sup_k |X_{t_k}| ≥ level.
    SupNormGeq { level: f64 },
    /// functional(path) ≥ threshold.
    CustomThreshold {
        functional: Arc<dyn Fn(&SamplePath) -> f64 + Send + Sync>,
        threshold: f64,
    },
}

impl fmt::Debug for PathEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

impl PathEvent {
    pub fn occurs(&self, path: &SamplePath) -> bool {
        match self {
            PathEvent::TerminalAbsGeq { level } => {
                path.values().last().unwrap().abs() >= *level
            }
            PathEvent::TerminalLeq { level } => *path.values().last().unwrap() <= *level,
            PathEvent::SupNormGeq { level } => {
                path.values().iter().any(|v| v.abs() >= *level)
            }
            PathEvent::CustomThreshold {
                functional,
                threshold,
            } => functional(path) >= *threshold,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            PathEvent::TerminalAbsGeq { level } => format!("|X_T| >= {level}"),
            PathEvent::TerminalLeq { level } => format!("X_T <= {level}"),
            PathEvent::SupNormGeq { level } => format!("sup|X| >= {level}"),
            PathEvent::CustomThreshold { threshold, .. } => {
                format!("functional >= {threshold}")
            }
        }
    }
}

/// Result of a Monte Carlo sup over a finite family.
#[derive(Debug, Clone)]
pub struct McEstimate {
    /// max over the family of Monte Carlo means — a lower bound on the true
    /// upper expectation, exact over the family up to sampling error.
    pub estimate: f64,
    pub stderr: f64,
    /// Index of the maximizing policy in the family.
    pub argmax: usize,
    /// (mean, stderr) per policy, in family order.
    pub per_policy: Vec<(f64, f64)>,
}

fn per_policy_values<F: Fn(&SamplePath) -> f64 + Sync>(
    policy: &VolatilityPolicy,
    grid: &TimeGrid,
    n_paths: usize,
    seed: u64,
    eval: &F,
) -> Result<Vec<f64>> {
    (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let path = simulate_path(policy, grid, path_seed(seed, i as u64))?;
            Ok(eval(&path))
        })
        .collect()
}

fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Monte Carlo estimate of the upper expectation sup_θ E_θ[functional] over
/// the finite family; deterministic given the seed (common random numbers
/// across policies, ordered reduction across paths).
pub fn mc_upper_expectation(
    functional: &PathFunctional,
    family: &PolicyFamily,
    grid: &TimeGrid,
    n_paths: usize,
    seed: u64,
) -> Result<McEstimate> {
    if n_paths < 100 {
        return Err(GlilError::Domain(format!(
            "need n_paths >= 100, got {n_paths}"
        )));
    }
    let mut per_policy = Vec::with_capacity(family.len());
    for policy in family.policies() {
        let vals = per_policy_values(policy, grid, n_paths, seed, &|p: &SamplePath| {
            functional.eval(p)
        })?;
        per_policy.push(mean_stderr(&vals));
    }
    let argmax = per_policy
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .0.partial_cmp(&b.1 .0).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    Ok(McEstimate {
        estimate: per_policy[argmax].0,
        stderr: per_policy[argmax].1,
        argmax,
        per_policy,
    })
}

/// Finite-family capacity bounds for one event: the best empirical
/// frequency bounds V from below, the worst bounds v from above.
#[derive(Debug, Clone)]
pub struct CapacityBounds {
    pub event: String,
    /// Lower bound for the upper capacity V(A): max of empirical frequencies.
    pub upper_capacity_lb: f64,
    pub upper_capacity_lb_stderr: f64,
    pub upper_capacity_argmax: usize,
    /// Upper bound for the lower capacity v(A): min of empirical frequencies.
    pub lower_capacity_ub: f64,
    pub lower_capacity_ub_stderr: f64,
    pub lower_capacity_argmin: usize,
    /// (frequency, stderr) per policy, in family order.
    pub per_policy: Vec<(f64, f64)>,
    pub n_paths: usize,
}

/// Empirical frequency bounds on (V(A), v(A)) over the family. The same
/// driver paths serve every policy, so for the complement event the
/// identity V̂(A) + v̂(A^c) = 1 holds path by path.
pub fn estimate_capacity_bounds(
    event: &PathEvent,
    family: &PolicyFamily,
    grid: &TimeGrid,
    n_paths: usize,
    seed: u64,
) -> Result<CapacityBounds> {
    if n_paths < 100 {
        return Err(GlilError::Domain(format!(
            "need n_paths >= 100, got {n_paths}"
        )));
    }
    let mut per_policy = Vec::with_capacity(family.len());
    for policy in family.policies() {
        let vals = per_policy_values(policy, grid, n_paths, seed, &|p: &SamplePath| {
            if event.occurs(p) {
                1.0
            } else {
                0.0
            }
        })?;
        let (freq, _) = mean_stderr(&vals);
        let se = (freq * (1.0 - freq) / n_paths as f64).sqrt();
        per_policy.push((freq, se));
    }
    let argmax = per_policy
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .0.partial_cmp(&b.1 .0).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let argmin = per_policy
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .0.partial_cmp(&b.1 .0).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    Ok(CapacityBounds {
        event: event.describe(),
        upper_capacity_lb: per_policy[argmax].0,
        upper_capacity_lb_stderr: per_policy[argmax].1,
        upper_capacity_argmax: argmax,
        lower_capacity_ub: per_policy[argmin].0,
        lower_capacity_ub_stderr: per_policy[argmin].1,
        lower_capacity_argmin: argmin,
        per_policy,
        n_paths,
    })
}
