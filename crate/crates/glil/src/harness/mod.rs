//! End-to-end LIL experiments: configuration, invariance runs over
//! subsequence schedules, example statistics, and functional-image checks.

mod config;
mod experiment;
pub mod report;
mod schedule;
mod statistics;

pub use config::{
    BetaConfig, ExamplesConfig, ExperimentConfig, GridConfig, IntervalConfig, NetConfig,
    PolicyConfig, SeedConfig, ToleranceConfig,
};
pub use experiment::{
    functional_image_experiment, run_examples_experiment, run_invariance_experiment, LilOutcome,
};
pub use report::{csv_text, CsvRow, ExperimentReport, ReportItem};
pub use schedule::{subsequence_schedule, ScheduleKind, SubsequenceSchedule};
pub use statistics::{
    abs_power_constant, abs_power_statistic, example_bounds, normalizer_abs_power,
    normalizer_weighted, weighted_sum_statistic, ExampleKind, FunctionalMap,
};
