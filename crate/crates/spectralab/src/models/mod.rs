//! Training procedures: the non-saturating GAN with optional Jacobian
//! Clamping, the scoring classifier, the VAE baseline, and the memorizing
//! generator counterexample.

mod classifier;
mod gan;
mod memorizer;
mod vae;

pub use classifier::{
    argmax, feature_activations, train_classifier, ClassifierResult, CLASSIFIER_HIDDEN_WIDTH,
};
pub use gan::{
    gan_losses, gan_train_step, jacobian_clamping_penalty, ClampConfig, ClampNormMode,
    ClampPenalty, GanTrainState, StepMetrics,
};
pub use memorizer::{train_memorizer, MemorizerConfig, MemorizerResult};
pub use vae::{gaussian_kl, train_vae, VaeTrainResult};

use crate::data::DataError;
use crate::nn::NnError;

/// Errors from the training procedures.
#[derive(Debug)]
pub enum ModelError {
    EmptyBatch,
    /// The clamping penalty was requested with a disabled config.
    ClampDisabled,
    InvalidParameter(String),
    WrongBatchSize { expected: usize, got: usize },
    /// Scoring and classification need labels.
    UnlabeledDataset,
    /// Training diverged; the run should abort but keep its last metrics.
    NonFiniteLoss { step: u64, l_d: f64, l_g: f64 },
    Nn(NnError),
    Data(DataError),
}

impl std::fmt::Display for ModelError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelError::EmptyBatch => write!(f, "batch is empty"),
            ModelError::ClampDisabled => {
                write!(f, "jacobian clamping penalty requested with a disabled config")
            }
            ModelError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            ModelError::WrongBatchSize { expected, got } => {
                write!(f, "batch size mismatch: expected {expected}, got {got}")
            }
            ModelError::UnlabeledDataset => write!(f, "dataset has no labels"),
            ModelError::NonFiniteLoss { step, l_d, l_g } => {
                write!(f, "nonfinite loss at step {step} (l_d={l_d}, l_g={l_g})")
            }
            ModelError::Nn(e) => write!(f, "{e}"),
            ModelError::Data(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ModelError {}

impl From<NnError> for ModelError {
    fn from(e: NnError) -> Self {
        ModelError::Nn(e)
    }
}

impl From<DataError> for ModelError {
    fn from(e: DataError) -> Self {
        ModelError::Data(e)
    }
}
