//! Command-line front-end for `thermomi`: β sweeps with JSON/CSV reports and
//! a verification suite with a CI-friendly exit status.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 bad
//! configuration or I/O, 3 numerical failure.

pub mod config;
pub mod report;
pub mod sweep;
pub mod verify;

pub use config::{BetaGrid, RunConfig, Spacing, Validated};
pub use report::{ReportHeader, SweepRecord, SweepReport};
pub use sweep::{run_sweep, Routes, SweepOptions};
pub use verify::{run_verify, Verification};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}
