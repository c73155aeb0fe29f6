//! Experiment harness: structured plan files, analytical and Monte-Carlo
//! sweep execution with deterministic CSV output, plot-script emission,
//! and best-platform/scheme decision tables.

pub mod plan;
pub mod run;
pub mod summarize;

pub use plan::{Engine, ExperimentPlan};
pub use run::{run_experiment, RunOutput};
pub use summarize::{summarize_best, Objective};
