//! Config-driven runs: the full refinement study for one scenario, sweeps
//! over `(p, s)`, and the artifacts they write.

mod config;
mod run;
mod study;
mod sweep;

pub use config::{
    AlphaPolicy, AxisRange, Config, DiagnosticsConfig, GridConfig, RefinementConfig, RichardsonPolicy, SweepConfig,
    SCHEMA_VERSION,
};
pub use run::{run, run_sweep, Manifest, ManifestEntry, Mode, RunSummary};
pub use study::{far_probes, locus_points, run_study, AlphaChoice, LevelResult, StudyOutcome};
pub use sweep::{feasibility_cell, sweep, sweep_csv, SweepCell};

use std::path::PathBuf;

use thiserror::Error;

use crate::diagnostics::DiagError;
use crate::fields::FieldError;
use crate::linprop::LinPropError;
use crate::nlsolve::SolveError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    LinProp(#[from] LinPropError),
    #[error(transparent)]
    Diag(#[from] DiagError),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solve(_) => 3,
            _ => 1,
        }
    }
}
