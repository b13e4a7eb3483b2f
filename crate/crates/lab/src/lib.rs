//! Scenario-driven experiments over `plab_core`: registry, reports, run
//! directories and plot data.

pub mod experiments;
pub mod plots;
pub mod registry;
pub mod report;
pub mod runner;
pub mod scenario;

pub use report::{ExperimentReport, CHECKS};
pub use runner::{configure_threads, run_scenario, RunSummary};
pub use scenario::{Scenario, SCHEMA_VERSION};
