//! Adapted volatility policies.
//!
//! A policy produces the control θ_k from (t_k, X_0..X_k) and policy-owned
//! randomness that is independent of the driver noise. Driver and policy
//! randomness use separate counter-based streams keyed by the path seed, so
//! path i is bit-identical regardless of thread count, and controls can be
//! replayed exactly from a recorded path prefix.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GlilError, Result};
use crate::gheat::{curvature_table, CurvatureTable, PdeSolverParams};
use crate::model::{TestFunction, VolatilityInterval};

const DRIVER_TAG: u64 = 0x9e3779b97f4a7c15;
const POLICY_TAG: u64 = 0xd1b54a32d192ed03;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Seed for path `index` within a batch keyed by `base`; stable mixing so
/// per-path streams do not depend on scheduling order.
pub fn path_seed(base: u64, index: u64) -> u64 {
    let mut s = base ^ index.wrapping_mul(0xa0761d6478bd642f);
    splitmix64(&mut s)
}

pub(crate) fn stream_rng(seed: u64, tag: u64) -> ChaCha8Rng {
    let mut s = seed ^ tag;
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut s).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

pub(crate) fn driver_rng(seed: u64) -> ChaCha8Rng {
    stream_rng(seed, DRIVER_TAG)
}

/// An adapted rule producing a control value in [σ̲, σ̄] at each step.
#[derive(Debug, Clone)]
pub enum VolatilityPolicy {
    /// θ ≡ sigma.
    Constant { sigma: f64 },
    /// θ_t = values[j] on [breakpoints[j-1], breakpoints[j[).
    PiecewiseDeterministic {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    /// θ depends on the sign of the current state.
    SignFeedback {
        sigma_positive: f64,
        sigma_negative: f64,
    },
    /// σ̄ where the solved value function is locally convex, σ̲ where concave.
    ConvexityFeedback {
        table: Arc<CurvatureTable>,
        horizon: f64,
        interval: VolatilityInterval,
    },
    /// Markov switching among `values` at exponential rate, driven by the
    /// policy-owned stream.
    RegimeSwitching { rate: f64, values: Vec<f64> },
}

/// Per-path mutable policy state (owned randomness and regime).
#[derive(Debug, Clone)]
pub struct PolicyState {
    rng: Option<ChaCha8Rng>,
    current: f64,
}

impl VolatilityPolicy {
    pub fn constant(sigma: f64, interval: &VolatilityInterval) -> Result<Self> {
        check_in_interval(&[sigma], interval)?;
        Ok(VolatilityPolicy::Constant { sigma })
    }

    pub fn piecewise(
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        interval: &VolatilityInterval,
    ) -> Result<Self> {
        if values.len() != breakpoints.len() + 1 {
            return Err(GlilError::Domain(
                "piecewise policy needs one more value than breakpoints".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) || breakpoints.iter().any(|&b| b < 0.0) {
            return Err(GlilError::Domain(
                "piecewise breakpoints must be nonnegative and strictly increasing".into(),
            ));
        }
        check_in_interval(&values, interval)?;
        Ok(VolatilityPolicy::PiecewiseDeterministic {
            breakpoints,
            values,
        })
    }

    pub fn sign_feedback(
        sigma_positive: f64,
        sigma_negative: f64,
        interval: &VolatilityInterval,
    ) -> Result<Self> {
        check_in_interval(&[sigma_positive, sigma_negative], interval)?;
        Ok(VolatilityPolicy::SignFeedback {
            sigma_positive,
            sigma_negative,
        })
    }

    /// Solves the PDE for `target` once and keeps curvature-sign snapshots
    /// at `time_steps` uniform remaining times over [0, horizon].
    pub fn convexity_feedback(
        target: &TestFunction,
        horizon: f64,
        interval: &VolatilityInterval,
        params: &PdeSolverParams,
        time_steps: usize,
    ) -> Result<Self> {
        if time_steps == 0 {
            return Err(GlilError::Domain("convexity policy needs time_steps >= 1".into()));
        }
        let times: Vec<f64> = (0..=time_steps)
            .map(|k| horizon * k as f64 / time_steps as f64)
            .collect();
        let table = curvature_table(target, horizon, interval, params, &times)?;
        Ok(VolatilityPolicy::ConvexityFeedback {
            table: Arc::new(table),
            horizon,
            interval: *interval,
        })
    }

    pub fn regime_switching(
        rate: f64,
        values: Vec<f64>,
        interval: &VolatilityInterval,
    ) -> Result<Self> {
        if !(rate > 0.0) || values.is_empty() {
            return Err(GlilError::Domain(
                "regime switching needs a positive rate and at least one value".into(),
            ));
        }
        check_in_interval(&values, interval)?;
        Ok(VolatilityPolicy::RegimeSwitching { rate, values })
    }

    /// All control values this policy can emit lie in `interval`.
    pub fn respects(&self, interval: &VolatilityInterval) -> bool {
        match self {
            VolatilityPolicy::Constant { sigma } => interval.contains(*sigma),
            VolatilityPolicy::PiecewiseDeterministic { values, .. } => {
                values.iter().all(|&v| interval.contains(v))
            }
            VolatilityPolicy::SignFeedback {
                sigma_positive,
                sigma_negative,
            } => interval.contains(*sigma_positive) && interval.contains(*sigma_negative),
            VolatilityPolicy::ConvexityFeedback { interval: own, .. } => {
                interval.contains(own.low()) && interval.contains(own.high())
            }
            VolatilityPolicy::RegimeSwitching { values, .. } => {
                values.iter().all(|&v| interval.contains(v))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            VolatilityPolicy::Constant { sigma } => format!("constant({sigma})"),
            VolatilityPolicy::PiecewiseDeterministic { values, .. } => {
                format!("piecewise({} segments)", values.len())
            }
            VolatilityPolicy::SignFeedback {
                sigma_positive,
                sigma_negative,
            } => format!("sign_feedback({sigma_positive},{sigma_negative})"),
            VolatilityPolicy::ConvexityFeedback { .. } => "convexity_feedback".into(),
            VolatilityPolicy::RegimeSwitching { rate, values } => {
                format!("regime_switching(rate={rate},{} values)", values.len())
            }
        }
    }

    /// Fresh per-path state; `seed` is the path seed.
    pub fn init_state(&self, seed: u64) -> PolicyState {
        match self {
            VolatilityPolicy::RegimeSwitching { values, .. } => {
                let mut rng = stream_rng(seed, POLICY_TAG);
                let idx = rng.gen_range(0..values.len());
                PolicyState {
                    current: values[idx],
                    rng: Some(rng),
                }
            }
            _ => PolicyState {
                rng: None,
                current: 0.0,
            },
        }
    }

    /// Control θ_k given the step index, current time, step size and the
    /// current state value X_k.
    pub fn control(&self, state: &mut PolicyState, time: f64, dt: f64, x: f64) -> f64 {
        match self {
            VolatilityPolicy::Constant { sigma } => *sigma,
            VolatilityPolicy::PiecewiseDeterministic {
                breakpoints,
                values,
            } => {
                let idx = breakpoints.partition_point(|&b| b <= time);
                values[idx]
            }
            VolatilityPolicy::SignFeedback {
                sigma_positive,
                sigma_negative,
            } => {
                if x >= 0.0 {
                    *sigma_positive
                } else {
                    *sigma_negative
                }
            }
            VolatilityPolicy::ConvexityFeedback {
                table,
                horizon,
                interval,
            } => {
                let remaining = (horizon - time).max(0.0);
                if table.sign_at(remaining, x) >= 0 {
                    interval.high()
                } else {
                    interval.low()
                }
            }
            VolatilityPolicy::RegimeSwitching { rate, values } => {
                let rng = state.rng.as_mut().expect("regime state carries rng");
                let p_switch = 1.0 - (-rate * dt).exp();
                if rng.gen::<f64>() < p_switch {
                    let idx = rng.gen_range(0..values.len());
                    state.current = values[idx];
                }
                state.current
            }
        }
    }
}

fn check_in_interval(values: &[f64], interval: &VolatilityInterval) -> Result<()> {
    for &v in values {
        if !interval.contains(v) {
            return Err(GlilError::Domain(format!(
                "control value {v} outside [{}, {}]",
                interval.low(),
                interval.high()
            )));
        }
    }
    Ok(())
}
