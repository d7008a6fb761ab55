//! Euler discretization of ∫θ dW and realized quadratic variation.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{GlilError, Result};
use crate::model::{SamplePath, TimeGrid};

use super::policy::{driver_rng, VolatilityPolicy};

/// Simulates X_{k+1} = X_k + θ_k √dt Z_k with the adapted control θ_k and
/// i.i.d. standard normal driver noise from the seeded per-path stream.
pub fn simulate_path(policy: &VolatilityPolicy, grid: &TimeGrid, seed: u64) -> Result<SamplePath> {
    Ok(simulate_path_with_controls(policy, grid, seed)?.0)
}

/// Like [`simulate_path`], also returning the control value used at each step.
pub fn simulate_path_with_controls(
    policy: &VolatilityPolicy,
    grid: &TimeGrid,
    seed: u64,
) -> Result<(SamplePath, Vec<f64>)> {
    let steps = grid.steps();
    let dt = grid.dt();
    let sqrt_dt = dt.sqrt();
    let mut rng = driver_rng(seed);
    let mut state = policy.init_state(seed);
    let mut values = Vec::with_capacity(steps + 1);
    let mut controls = Vec::with_capacity(steps);
    let mut x = 0.0f64;
    values.push(x);
    for k in 0..steps {
        let t = grid.time_at(k);
        let theta = policy.control(&mut state, t, dt, x);
        controls.push(theta);
        let z: f64 = rng.sample(StandardNormal);
        x += theta * sqrt_dt * z;
        values.push(x);
    }
    Ok((SamplePath::new(*grid, values)?, controls))
}

/// Σ (X_{t_{i+1}} − X_{t_i})² over the on-grid window [s, t].
pub fn realized_quadratic_variation(path: &SamplePath, s: f64, t: f64) -> Result<f64> {
    if s < 0.0 || s >= t {
        return Err(GlilError::Domain(format!("need 0 <= s < t, got s={s}, t={t}")));
    }
    let i = path.grid().index_of(s)?;
    let j = path.grid().index_of(t)?;
    let v = path.values();
    Ok(v[i..j]
        .iter()
        .zip(&v[i + 1..=j])
        .map(|(a, b)| (b - a) * (b - a))
        .sum())
}
