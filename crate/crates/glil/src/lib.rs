//! Numerics for sublinear expectations and G-Brownian motion.
//!
//! The crate computes G-expectations by solving the fully nonlinear heat
//! equation ∂_t u = G(∂_xx u), simulates controlled-volatility diffusions
//! under adapted policies, estimates the induced upper/lower capacities,
//! and runs desk-scale experiments probing the functional law of the
//! iterated logarithm (Strassen-type cluster sets) for these processes.
//!
//! Modules:
//! - [`model`] — shared domain types and the loglog normalization
//! - [`gheat`] — the G-heat PDE solver and distribution/inequality checks
//! - [`sim`]   — path simulation, Monte Carlo expectations, capacities
//! - [`strassen`] — rescaling, Strassen balls, distances, nets, clusters
//! - [`harness`]  — end-to-end experiments, schedules, example statistics

// float guards use the negated form (`!(x > 0.0)`) so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gheat;
pub mod harness;
pub mod model;
pub mod sim;
pub mod strassen;

pub use error::{GlilError, Result};
pub use model::{loglog_scale, SamplePath, TestFunction, TimeGrid, VolatilityInterval};
