//! Experiment runner for the `xdo-core` solvers: resolved configs, seeded runs with
//! CSV traces and JSON summaries, the PSRO strategy-count histogram, and restricted
//! game size reports.

pub mod config;
mod error;
pub mod hist;
pub mod run;
pub mod size;

pub use config::{Algo, Budget, Cadence, ExperimentConfig, FileConfig, GameSpec, Overrides};
pub use error::BenchError;
pub use run::{run, run_single, RunOutput, RunSummary, CSV_HEADER, SCHEMA_VERSION};
