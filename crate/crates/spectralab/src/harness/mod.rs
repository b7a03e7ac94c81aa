//! Experiment orchestration: configuration, run execution, multi-run
//! sweeps, metric persistence, report emission, and the CLI.

pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod report;
pub mod run;
pub mod runlog;
pub mod svg;
pub mod sweep;

pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use config::{
    derive_seed, ArchitectureSpec, DatasetSpec, MemorizeConfig, RunConfig, SeedSpec, VaeConfig,
    CONFIG_SCHEMA_VERSION,
};
pub use report::report;
pub use run::{build_context, run_experiment, run_experiment_with_context, RunContext};
pub use runlog::{read_run_dir, DiagRecord, RunLog, RunSummary, CSV_HEADER};
pub use sweep::{sweep, ClusterStat, SweepOptions, SweepSummary};

use crate::data::DataError;
use crate::diagnostics::DiagnosticsError;
use crate::linalg::LinalgError;
use crate::models::ModelError;
use crate::nn::NnError;
use std::path::PathBuf;

/// Errors from the harness layer.
#[derive(Debug)]
pub enum HarnessError {
    Io { path: PathBuf, source: std::io::Error },
    Config(String),
    CsvParse { file: PathBuf, line: usize, what: String },
    NoRunsFound { dir: PathBuf },
    CheckpointBadMagic,
    CheckpointVersionMismatch { got: char },
    CheckpointTruncated { expected: usize, got: usize },
    CheckpointTrailingBytes { extra: usize },
    CheckpointBadActivation { tag: u8 },
    CheckpointShapeMismatch { what: String },
    Model(ModelError),
    Data(DataError),
    Diagnostics(DiagnosticsError),
    Nn(NnError),
    Linalg(LinalgError),
}

impl std::fmt::Display for HarnessError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HarnessError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            HarnessError::Config(msg) => write!(f, "config error: {msg}"),
            HarnessError::CsvParse { file, line, what } => {
                write!(f, "{}:{line}: {what}", file.display())
            }
            HarnessError::NoRunsFound { dir } => {
                write!(f, "no runs found under {}", dir.display())
            }
            HarnessError::CheckpointBadMagic => write!(f, "checkpoint: bad magic string"),
            HarnessError::CheckpointVersionMismatch { got } => {
                write!(f, "checkpoint: unsupported version '{got}'")
            }
            HarnessError::CheckpointTruncated { expected, got } => {
                write!(f, "checkpoint truncated: needed {expected} bytes, have {got}")
            }
            HarnessError::CheckpointTrailingBytes { extra } => {
                write!(f, "checkpoint has {extra} trailing bytes")
            }
            HarnessError::CheckpointBadActivation { tag } => {
                write!(f, "checkpoint: unknown activation tag {tag}")
            }
            HarnessError::CheckpointShapeMismatch { what } => {
                write!(f, "checkpoint shape mismatch: {what}")
            }
            HarnessError::Model(e) => write!(f, "{e}"),
            HarnessError::Data(e) => write!(f, "{e}"),
            HarnessError::Diagnostics(e) => write!(f, "{e}"),
            HarnessError::Nn(e) => write!(f, "{e}"),
            HarnessError::Linalg(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<ModelError> for HarnessError {
    fn from(e: ModelError) -> Self {
        HarnessError::Model(e)
    }
}

impl From<DataError> for HarnessError {
    fn from(e: DataError) -> Self {
        HarnessError::Data(e)
    }
}

impl From<DiagnosticsError> for HarnessError {
    fn from(e: DiagnosticsError) -> Self {
        HarnessError::Diagnostics(e)
    }
}

impl From<NnError> for HarnessError {
    fn from(e: NnError) -> Self {
        HarnessError::Nn(e)
    }
}

impl From<LinalgError> for HarnessError {
    fn from(e: LinalgError) -> Self {
        HarnessError::Linalg(e)
    }
}
