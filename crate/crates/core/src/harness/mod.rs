//! Experiments and reports.
//!
//! An [`ExperimentConfig`] names a data source and the solver settings;
//! [`run_experiment`] repeats split, train and test, and
//! [`emit_report`] renders the result as a table, CSV or JSON.

mod config;
mod experiment;
mod model;
mod report;

pub use config::{DataSource, ExperimentConfig, Occlusion};
pub use experiment::{
    accuracy_pct, fit_dataset, load_source, nearest_neighbor, requested_threads, run_experiment,
    run_rpca_baseline,
};
pub use model::{Model, TrainOptions, Trained};
pub use report::{emit_report, hardware_summary, RepetitionRecord, Report, ReportFormat};
