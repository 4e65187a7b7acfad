//! Experiment harness: config parsing, seeded sweeps, oracle baselines and
//! summary reports.

pub mod config;
pub mod oracle;
pub mod report;
pub mod run;
mod svg;

use std::path::PathBuf;

pub use config::{load_config, parse_config, parse_plan_csv, ExperimentConfig};
pub use oracle::cmd_oracle;
pub use report::{cmd_report, read_summaries, ReportOptions, ReportRow};
pub use run::{cmd_run, execute, RunOverrides, SummaryRow};

/// Exit code for a failed run.
pub const EXIT_RUN_FAILURE: i32 = 1;
/// Exit code for an unusable config.
pub const EXIT_CONFIG_ERROR: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("run failed: {0}")]
    Run(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("no summary rows under {0}")]
    EmptyInput(PathBuf),
    #[error("{0} malformed summary rows")]
    Malformed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG_ERROR,
            _ => EXIT_RUN_FAILURE,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Worker count from `PLANPACE_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var("PLANPACE_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}
