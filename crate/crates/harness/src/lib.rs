//! Configuration, experiment orchestration and result files for the
//! `ustash` command-line tool.

pub mod analyze;
pub mod config;
pub mod error;
pub mod experiment;
pub mod figures;
pub mod report;

pub use config::{ExperimentConfig, OutputFormat, SweepParam, SweepSpec};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, Plan};
pub use figures::emit_figures;
pub use report::Report;
