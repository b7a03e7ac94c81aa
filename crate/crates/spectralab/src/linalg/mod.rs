//! Dense symmetric eigendecomposition, PSD square roots, spectrum
//! summaries, and covariance estimation.
//!
//! Everything in this module is a pure function of its inputs; matrices are
//! small (latent and feature dimensions, tens of entries wide), so the
//! algorithms favour numerical clarity over asymptotic speed.

mod eigen;
mod matrix;
mod stats;

pub use eigen::{clamp_psd_eigenvalues, psd_sqrt, sym_eig, EigenDecomposition};
pub use matrix::Matrix;
pub use stats::{
    covariance_stats, spectrum_report, spectrum_report_from_values, GaussianStats, SpectrumReport,
};

/// Errors from the linear-algebra substrate.
#[derive(Debug, Clone, PartialEq)]
pub enum LinalgError {
    /// A square-matrix operation received a rectangular input.
    NotSquare { rows: usize, cols: usize },
    /// Symmetry precondition violated; `gap` is the largest `|a_ij - a_ji|`.
    NotSymmetric { gap: f64 },
    /// A claimed-PSD matrix had an eigenvalue below the roundoff band.
    NotPsd { min_eigenvalue: f64 },
    /// Jacobi iteration failed to reach the off-diagonal threshold.
    NoConvergence { sweeps: usize },
    /// Spectrum operations need at least one eigenvalue.
    EmptySpectrum,
    /// The leading eigenvalue was not positive.
    DegenerateSpectrum { lambda_max: f64 },
    /// Covariance estimation needs at least two samples.
    InsufficientSamples { n: usize },
    /// Operand shapes do not line up.
    DimensionMismatch { expected: usize, got: usize },
}

impl std::fmt::Display for LinalgError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LinalgError::NotSquare { rows, cols } => {
                write!(f, "matrix must be square, got {rows}x{cols}")
            }
            LinalgError::NotSymmetric { gap } => {
                write!(f, "matrix must be symmetric, max |a_ij - a_ji| = {gap:e}")
            }
            LinalgError::NotPsd { min_eigenvalue } => {
                write!(f, "matrix is not positive semi-definite, min eigenvalue {min_eigenvalue:e}")
            }
            LinalgError::NoConvergence { sweeps } => {
                write!(f, "Jacobi iteration did not converge in {sweeps} sweeps")
            }
            LinalgError::EmptySpectrum => write!(f, "spectrum is empty"),
            LinalgError::DegenerateSpectrum { lambda_max } => {
                write!(f, "degenerate spectrum, lambda_max = {lambda_max:e} is not positive")
            }
            LinalgError::InsufficientSamples { n } => {
                write!(f, "covariance needs at least 2 samples, got {n}")
            }
            LinalgError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
        }
    }
}

impl std::error::Error for LinalgError {}
