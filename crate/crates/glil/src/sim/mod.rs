//! Dual-representation machinery: adapted volatility policies driving
//! ∫θ dW, Monte Carlo upper/lower expectations over policy families,
//! capacity bounds, and policy-parameter search.
//!
//! Finite families only bound the capacities: the max of empirical
//! frequencies is a lower bound for V and the min an upper bound for v.
//! Outputs are labelled as bounds accordingly.

mod monte_carlo;
mod optimize;
mod paths;
pub(crate) mod policy;

pub use monte_carlo::{
    estimate_capacity_bounds, mc_upper_expectation, CapacityBounds, McEstimate, PathEvent,
    PathFunctional, PolicyFamily,
};
pub use optimize::{optimize_policy, Objective, OptimResult, ParamPolicyFamily};
pub use paths::{realized_quadratic_variation, simulate_path, simulate_path_with_controls};
pub use policy::{path_seed, PolicyState, VolatilityPolicy};
