//! Measurement machinery: metric-tensor spectra, conditioning summaries,
//! directional stretch verification, classifier scores, Frechet distances,
//! and missing-mode statistics.

mod scores;
mod spectra;

pub use scores::{
    classifier_score, classifier_score_from_probs, condition_mode_correlation,
    frechet_distance, frechet_distance_with_jitter, label_distribution, mode_report,
    LabelDistribution, ModeReport, FRECHET_JITTER,
};
pub use spectra::{
    average_jacobian, average_jacobian_spectrum, directional_stretch_check,
    mean_log_condition, metric_tensor_spectrum, ConditionSummary, DirectionalStretch,
};

use crate::linalg::LinalgError;
use crate::nn::NnError;

/// Errors from the diagnostics layer.
#[derive(Debug)]
pub enum DiagnosticsError {
    EmptySamples,
    EmptyProbe,
    /// Every probe point produced a degenerate (zero) metric tensor.
    AllPointsDegenerate,
    /// Pearson correlation needs at least 3 runs.
    TooFewRuns { got: usize },
    /// Pearson correlation is undefined without variance in both coordinates.
    DegenerateCorrelation,
    DimensionMismatch { expected: usize, got: usize },
    EigenIndexOutOfRange { index: usize, dim: usize },
    Linalg(LinalgError),
    Nn(NnError),
}

impl std::fmt::Display for DiagnosticsError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DiagnosticsError::EmptySamples => write!(f, "sample batch is empty"),
            DiagnosticsError::EmptyProbe => write!(f, "probe batch is empty"),
            DiagnosticsError::AllPointsDegenerate => {
                write!(f, "every probe point has a degenerate metric tensor")
            }
            DiagnosticsError::TooFewRuns { got } => {
                write!(f, "correlation needs at least 3 runs, got {got}")
            }
            DiagnosticsError::DegenerateCorrelation => {
                write!(f, "correlation undefined: zero variance in a coordinate")
            }
            DiagnosticsError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            DiagnosticsError::EigenIndexOutOfRange { index, dim } => {
                write!(f, "eigen index {index} out of range for dimension {dim}")
            }
            DiagnosticsError::Linalg(e) => write!(f, "{e}"),
            DiagnosticsError::Nn(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DiagnosticsError {}

impl From<LinalgError> for DiagnosticsError {
    fn from(e: LinalgError) -> Self {
        DiagnosticsError::Linalg(e)
    }
}

impl From<NnError> for DiagnosticsError {
    fn from(e: NnError) -> Self {
        DiagnosticsError::Nn(e)
    }
}
