//! Fully connected networks with reverse-mode parameter gradients,
//! forward-mode Jacobian-vector products, exact Jacobian assembly, and an
//! Adam optimizer.

mod activation;
mod adam;
mod mlp;

pub use activation::{Activation, LEAKY_SLOPE};
pub use adam::{
    AdamState, DEFAULT_BETA1, DEFAULT_BETA2, DEFAULT_EPSILON, DEFAULT_LEARNING_RATE,
};
pub use mlp::{softmax_rows, BackwardResult, ForwardTrace, Gradients, Mlp, DEFAULT_INIT_STD};

/// Errors from network evaluation and optimization.
#[derive(Debug, Clone, PartialEq)]
pub enum NnError {
    DimensionMismatch { what: &'static str, expected: usize, got: usize },
    NonFiniteGradient { param: String },
}

impl std::fmt::Display for NnError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NnError::DimensionMismatch { what, expected, got } => {
                write!(f, "{what} mismatch: expected {expected}, got {got}")
            }
            NnError::NonFiniteGradient { param } => {
                write!(f, "nonfinite gradient in {param}")
            }
        }
    }
}

impl std::error::Error for NnError {}
