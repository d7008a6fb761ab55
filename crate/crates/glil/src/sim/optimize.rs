//! Policy-parameter search: coordinate grid pass followed by local
//! bisection refinement, with common random numbers across candidates.

use crate::error::{GlilError, Result};
use crate::model::{TimeGrid, VolatilityInterval};

use super::monte_carlo::{PathEvent, PathFunctional};
use super::paths::simulate_path;
use super::policy::{path_seed, VolatilityPolicy};
use rayon::prelude::*;

/// A parameterized family with box search bounds [σ̲, σ̄] per coordinate.
#[derive(Debug, Clone)]
pub enum ParamPolicyFamily {
    /// θ ≡ p₀.
    Constant { interval: VolatilityInterval },
    /// (p₀ when X ≥ 0, p₁ when X < 0).
    SignFeedback { interval: VolatilityInterval },
    /// One value per segment between the fixed breakpoints.
    PiecewiseConstant {
        interval: VolatilityInterval,
        breakpoints: Vec<f64>,
    },
}

impl ParamPolicyFamily {
    pub fn dim(&self) -> usize {
        match self {
            ParamPolicyFamily::Constant { .. } => 1,
            ParamPolicyFamily::SignFeedback { .. } => 2,
            ParamPolicyFamily::PiecewiseConstant { breakpoints, .. } => breakpoints.len() + 1,
        }
    }

    pub fn interval(&self) -> &VolatilityInterval {
        match self {
            ParamPolicyFamily::Constant { interval }
            | ParamPolicyFamily::SignFeedback { interval }
            | ParamPolicyFamily::PiecewiseConstant { interval, .. } => interval,
        }
    }

    pub fn instantiate(&self, params: &[f64]) -> Result<VolatilityPolicy> {
        if params.len() != self.dim() {
            return Err(GlilError::Domain(format!(
                "expected {} parameters, got {}",
                self.dim(),
                params.len()
            )));
        }
        match self {
            ParamPolicyFamily::Constant { interval } => {
                VolatilityPolicy::constant(params[0], interval)
            }
            ParamPolicyFamily::SignFeedback { interval } => {
                VolatilityPolicy::sign_feedback(params[0], params[1], interval)
            }
            ParamPolicyFamily::PiecewiseConstant {
                interval,
                breakpoints,
            } => VolatilityPolicy::piecewise(breakpoints.clone(), params.to_vec(), interval),
        }
    }
}

/// What the search optimizes.
#[derive(Debug, Clone)]
pub enum Objective {
    /// Mean of a path functional.
    Functional(PathFunctional),
    /// Empirical probability of an event.
    Event(PathEvent),
}

/// Search outcome.
#[derive(Debug, Clone)]
pub struct OptimResult {
    pub policy: VolatilityPolicy,
    pub params: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

fn evaluate(
    family: &ParamPolicyFamily,
    params: &[f64],
    objective: &Objective,
    grid: &TimeGrid,
    n_paths: usize,
    seed: u64,
) -> Result<f64> {
    let policy = family.instantiate(params)?;
    let total: f64 = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let path = simulate_path(&policy, grid, path_seed(seed, i as u64))?;
            Ok(match objective {
                Objective::Functional(f) => f.eval(&path),
                Objective::Event(e) => {
                    if e.occurs(&path) {
                        1.0
                    } else {
                        0.0
                    }
                }
            })
        })
        .collect::<Result<Vec<f64>>>()?
        .iter()
        .sum();
    Ok(total / n_paths as f64)
}

/// Maximizes (or minimizes) the objective over the parameter box with a
/// coordinate grid pass and local refinement; every candidate is evaluated
/// on the same driver paths. The returned value is at least as good as the
/// best grid candidate.
pub fn optimize_policy(
    family: &ParamPolicyFamily,
    objective: &Objective,
    maximize: bool,
    budget: usize,
    grid: &TimeGrid,
    n_paths: usize,
    seed: u64,
) -> Result<OptimResult> {
    let d = family.dim();
    let iv = family.interval();
    let (lo, hi) = (iv.low(), iv.high());
    if budget < 1 {
        return Err(GlilError::Budget("budget must be >= 1".into()));
    }

    // degenerate box: a single candidate
    if iv.is_degenerate() {
        let params = vec![lo; d];
        let value = evaluate(family, &params, objective, grid, n_paths, seed)?;
        return Ok(OptimResult {
            policy: family.instantiate(&params)?,
            params,
            value,
            evaluations: 1,
        });
    }

    // initial coordinate grid: at least 3 levels per dimension
    let min_family = 3usize.pow(d as u32);
    if budget < min_family {
        return Err(GlilError::Budget(format!(
            "budget {budget} below initial family size {min_family}"
        )));
    }
    let mut levels = 3usize;
    while (levels + 2).pow(d as u32) <= budget / 2 && levels + 2 <= 9 {
        levels += 2;
    }
    let grid_vals: Vec<f64> = (0..levels)
        .map(|i| lo + (hi - lo) * i as f64 / (levels - 1) as f64)
        .collect();

    let score = |v: f64| if maximize { v } else { -v };
    let mut evals = 0usize;
    let mut best_params: Vec<f64> = vec![lo; d];
    let mut best_value = f64::NEG_INFINITY;

    let mut idx = vec![0usize; d];
    loop {
        let params: Vec<f64> = idx.iter().map(|&i| grid_vals[i]).collect();
        let value = evaluate(family, &params, objective, grid, n_paths, seed)?;
        evals += 1;
        if score(value) > best_value {
            best_value = score(value);
            best_params = params;
        }
        // odometer increment
        let mut j = 0;
        while j < d {
            idx[j] += 1;
            if idx[j] < levels {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == d {
            break;
        }
    }

    // local refinement: shrink a coordinate step around the incumbent
    let mut span = (hi - lo) / (levels - 1) as f64;
    while evals + 2 * d <= budget && span > 1e-4 * (hi - lo) {
        span *= 0.5;
        for j in 0..d {
            for dir in [-1.0, 1.0] {
                let mut cand = best_params.clone();
                cand[j] = (cand[j] + dir * span).clamp(lo, hi);
                let value = evaluate(family, &cand, objective, grid, n_paths, seed)?;
                evals += 1;
                if score(value) > best_value {
                    best_value = score(value);
                    best_params = cand;
                }
            }
        }
    }

    let value = if maximize { best_value } else { -best_value };
    Ok(OptimResult {
        policy: family.instantiate(&best_params)?,
        params: best_params,
        value,
        evaluations: evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TestFunction;

    #[test]
    fn convex_objective_drives_sigma_up() {
        let iv = VolatilityInterval::new(1.0, 2.0).unwrap();
        let family = ParamPolicyFamily::Constant { interval: iv };
        let grid = TimeGrid::new(1.0, 100).unwrap();
        let res = optimize_policy(
            &family,
            &Objective::Functional(PathFunctional::Terminal(TestFunction::Quadratic)),
            true,
            40,
            &grid,
            2000,
            21,
        )
        .unwrap();
        assert!(res.params[0] > 1.95, "sigma* = {}", res.params[0]);
        assert!(res.evaluations <= 40);
    }

    #[test]
    fn concave_objective_drives_sigma_down() {
        let iv = VolatilityInterval::new(1.0, 2.0).unwrap();
        let family = ParamPolicyFamily::Constant { interval: iv };
        let grid = TimeGrid::new(1.0, 100).unwrap();
        let res = optimize_policy(
            &family,
            &Objective::Functional(PathFunctional::Terminal(TestFunction::NegQuadratic)),
            true,
            40,
            &grid,
            2000,
            21,
        )
        .unwrap();
        assert!(res.params[0] < 1.05, "sigma* = {}", res.params[0]);
    }

    #[test]
    fn degenerate_interval_returns_single_policy() {
        let iv = VolatilityInterval::new(1.0, 1.0).unwrap();
        let family = ParamPolicyFamily::Constant { interval: iv };
        let grid = TimeGrid::new(1.0, 50).unwrap();
        let res = optimize_policy(
            &family,
            &Objective::Functional(PathFunctional::Terminal(TestFunction::Quadratic)),
            true,
            1,
            &grid,
            500,
            2,
        )
        .unwrap();
        assert_eq!(res.params, vec![1.0]);
        assert_eq!(res.evaluations, 1);
    }

    #[test]
    fn budget_below_family_size_errors() {
        let iv = VolatilityInterval::new(1.0, 2.0).unwrap();
        let family = ParamPolicyFamily::SignFeedback { interval: iv };
        let grid = TimeGrid::new(1.0, 50).unwrap();
        assert!(matches!(
            optimize_policy(
                &family,
                &Objective::Functional(PathFunctional::SupAbs),
                true,
                8,
                &grid,
                500,
                2
            ),
            Err(GlilError::Budget(_))
        ));
    }

    #[test]
    fn refinement_beats_or_matches_grid_best() {
        let iv = VolatilityInterval::new(1.0, 2.0).unwrap();
        let family = ParamPolicyFamily::Constant { interval: iv };
        let grid = TimeGrid::new(1.0, 100).unwrap();
        let obj = Objective::Functional(PathFunctional::Terminal(TestFunction::Quadratic));
        // grid-only run (budget exactly the 3^1 minimum) vs refined run
        let coarse = optimize_policy(&family, &obj, true, 3, &grid, 1000, 5).unwrap();
        let refined = optimize_policy(&family, &obj, true, 30, &grid, 1000, 5).unwrap();
        assert!(refined.value >= coarse.value);
    }
}
