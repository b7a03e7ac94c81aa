//! Spectrum summaries and Gaussian sample statistics.

use super::{EigenDecomposition, LinalgError, Matrix};
use crate::scalar::{c, Scalar};

/// Relative floor applied to the smallest eigenvalue when forming the
/// condition number, so rank-deficient Jacobians produce large finite
/// values instead of infinities in the time series.
const CONDITION_FLOOR_REL: f64 = 1e-30;

/// Eigen/singular spectrum of a metric tensor plus derived summaries.
#[derive(Debug, Clone)]
pub struct SpectrumReport<T: Scalar> {
    /// Nonincreasing, nonnegative spectrum (roundoff negatives clamped).
    pub eigenvalues: Vec<T>,
    /// `lambda_max / max(lambda_min, floor)` with `floor = 1e-30 * lambda_max`.
    pub condition_number: T,
    /// Natural log of the condition number.
    pub log_condition: T,
    /// Sum of `ln` over the floored spectrum.
    pub log_determinant: T,
    /// Set when the floor bound on `lambda_min` was active.
    pub floored: bool,
}

/// Summaries of a descending eigenvalue spectrum.
pub fn spectrum_report<T: Scalar>(
    eig: &EigenDecomposition<T>,
) -> Result<SpectrumReport<T>, LinalgError> {
    spectrum_report_from_values(&eig.eigenvalues)
}

/// As [`spectrum_report`], starting from a raw descending spectrum.
pub fn spectrum_report_from_values<T: Scalar>(
    eigenvalues: &[T],
) -> Result<SpectrumReport<T>, LinalgError> {
    if eigenvalues.is_empty() {
        return Err(LinalgError::EmptySpectrum);
    }
    let lambda_max = eigenvalues[0];
    if lambda_max.is_nan() || lambda_max <= T::zero() {
        return Err(LinalgError::DegenerateSpectrum { lambda_max: lambda_max.to_f64() });
    }
    let floor = lambda_max * c::<T>(CONDITION_FLOOR_REL);
    let lambda_min = *eigenvalues.last().unwrap();
    let floored = lambda_min < floor;

    let clamped: Vec<T> = eigenvalues
        .iter()
        .map(|&x| if x < T::zero() { T::zero() } else { x })
        .collect();
    let condition_number = lambda_max / if floored { floor } else { lambda_min };
    let log_determinant = eigenvalues
        .iter()
        .map(|&x| if x < floor { floor } else { x })
        .map(|x| x.ln())
        .sum();

    Ok(SpectrumReport {
        eigenvalues: clamped,
        condition_number,
        log_condition: condition_number.ln(),
        log_determinant,
        floored,
    })
}

/// Mean vector and covariance matrix of feature activations.
#[derive(Debug, Clone)]
pub struct GaussianStats<T: Scalar> {
    pub mean: Vec<T>,
    pub cov: Matrix<T>,
}

impl<T: Scalar> GaussianStats<T> {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Sample mean and unbiased covariance of the rows of `samples`.
pub fn covariance_stats<T: Scalar>(samples: &Matrix<T>) -> Result<GaussianStats<T>, LinalgError> {
    let n = samples.rows();
    if n < 2 {
        return Err(LinalgError::InsufficientSamples { n });
    }
    let mean = samples.row_mean();
    let mut centered = samples.clone();
    for i in 0..n {
        for (x, m) in centered.row_mut(i).iter_mut().zip(&mean) {
            *x -= *m;
        }
    }
    let mut cov = centered
        .matmul_transpose_a(&centered)
        .scale(T::one() / T::from_usize(n - 1).unwrap());
    cov.symmetrize();
    Ok(GaussianStats { mean, cov })
}
