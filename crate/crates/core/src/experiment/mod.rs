//! Config-driven experiments: build operators from JSON recipes, run the
//! sampling pipelines and emit reports and CSV diagnostics.

pub mod builders;
pub mod config;
pub mod export;
pub mod report;
pub mod run;

pub use config::{
    BuilderSpec, CMatrixSpec, ConfigError, Diagnostic, ExperimentConfig, ExportKind, Options,
};
pub use report::{RunReport, Status};
pub use run::{exit_code, run, Command, RunError, RunOptions, EXIT_ERROR, EXIT_FAIL, EXIT_PASS};
