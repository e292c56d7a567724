//! Configuration, file formats and the end-to-end fitting pipeline built on
//! [`mtwfit_core`].

pub mod config;
pub mod error;
pub mod export;
pub mod ingest;
pub mod pipeline;
pub mod report;

pub use config::{InputFormat, Mode, RunConfig};
pub use error::{PipelineError, Stage};
pub use export::{export_plot_data, write_report};
pub use ingest::ingest;
pub use pipeline::{analyze, evaluate, generate, run, run_experiment1, run_fit};
pub use report::RunReport;

/// Environment variable that overrides the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "MTWFIT_OUTPUT_DIR";

/// Parses a criterion name for command-line arguments.
pub fn gof_criteria_arg(s: &str) -> Result<mtwfit_core::gof::Criterion, String> {
    s.parse().map_err(|e: mtwfit_core::Error| e.to_string())
}
