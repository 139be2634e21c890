//! Configuration, seeded orchestration, metrics and reporting.
//!
//! An [`ExperimentConfig`] names the environment, the learner
//! hyperparameters, the strategies to compare and the seeds. The [`Runner`]
//! executes one training run per `(strategy, seed)` or
//! `(sweep value, seed)` job, independently and in parallel, and the report
//! helpers write one CSV per run plus charts rendered from those CSVs.

mod config;
mod metrics;
mod report;
mod runner;
pub mod stats;

pub use config::{ExperimentConfig, Strategy, SweepAxis, SweepSpec};
pub use metrics::{MetricSeries, SweepRow};
pub use report::{
    read_series_csv, read_series_dir, read_sweep_csv, render_chart, render_dir, render_sweep_chart, write_series_csv,
    write_sweep_csv, SERIES_HEADER, SWEEP_HEADER,
};
pub use runner::{run_experiment, sweep, train_agent, ExperimentOutput, Job, Runner, SweepOutput};
