//! Classifier score, Frechet distance, and missing-mode statistics.

use super::DiagnosticsError;
use crate::linalg::{psd_sqrt, sym_eig, GaussianStats, Matrix};
use crate::models::argmax;
use crate::nn::{softmax_rows, Mlp};
use crate::scalar::{c, Scalar};

/// Jitter added to both covariances before the matrix square roots;
/// desk-scale covariance estimates from finite batches are near-singular.
pub const FRECHET_JITTER: f64 = 1e-6;

/// Per-sample class probabilities plus their marginal.
#[derive(Debug, Clone)]
pub struct LabelDistribution<T: Scalar> {
    /// `n x K` rows of `p(y | x)`, each summing to 1.
    pub per_sample: Matrix<T>,
    /// `p(y)`: the mean of the rows.
    pub marginal: Vec<T>,
}

/// Class counts over a sample batch with the least-sampled class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeReport {
    pub counts: Vec<usize>,
    pub least_sampled_class: usize,
    pub least_count: usize,
}

/// Softmax the classifier's logits over a sample batch and form the
/// marginal label distribution.
pub fn label_distribution<T: Scalar>(
    samples: &Matrix<T>,
    classifier: &Mlp<T>,
) -> Result<LabelDistribution<T>, DiagnosticsError> {
    if samples.rows() == 0 {
        return Err(DiagnosticsError::EmptySamples);
    }
    let logits = classifier.forward(samples)?;
    let per_sample = softmax_rows(&logits);
    let marginal = per_sample.row_mean();
    Ok(LabelDistribution { per_sample, marginal })
}

/// Classifier score `exp(E_x[KL(p(y|x) || p(y))])` from a probability table.
///
/// Rows must already be distributions; the marginal is their mean. The
/// result is clamped into its analytic range `[1, K]`.
pub fn classifier_score_from_probs<T: Scalar>(
    probs: &Matrix<T>,
) -> Result<T, DiagnosticsError> {
    let n = probs.rows();
    if n == 0 {
        return Err(DiagnosticsError::EmptySamples);
    }
    let marginal = probs.row_mean();
    let mut total_kl = T::zero();
    for i in 0..n {
        let mut kl = T::zero();
        for (&p, &q) in probs.row(i).iter().zip(&marginal) {
            if p > T::zero() {
                kl += p * (p / q).ln();
            }
        }
        total_kl += kl;
    }
    let score = (total_kl / T::from_usize(n).unwrap()).exp();
    let k = T::from_usize(probs.cols()).unwrap();
    Ok(score.max(T::one()).min(k))
}

/// Classifier score of generated samples under a trained classifier.
pub fn classifier_score<T: Scalar>(
    samples: &Matrix<T>,
    classifier: &Mlp<T>,
) -> Result<T, DiagnosticsError> {
    let dist = label_distribution(samples, classifier)?;
    classifier_score_from_probs(&dist.per_sample)
}

/// Frechet distance between Gaussian feature statistics, with the default
/// covariance jitter.
pub fn frechet_distance<T: Scalar>(
    a: &GaussianStats<T>,
    b: &GaussianStats<T>,
) -> Result<T, DiagnosticsError> {
    frechet_distance_with_jitter(a, b, FRECHET_JITTER)
}

/// `|m_a - m_b|^2 + Tr(C_a) + Tr(C_b) - 2 Tr((C_a^{1/2} C_b C_a^{1/2})^{1/2})`.
///
/// The symmetrized square-root form keeps the result numerically symmetric
/// in its arguments; `jitter * I` is added to both covariances first.
pub fn frechet_distance_with_jitter<T: Scalar>(
    a: &GaussianStats<T>,
    b: &GaussianStats<T>,
    jitter: f64,
) -> Result<T, DiagnosticsError> {
    if a.dim() != b.dim() || a.cov.rows() != b.cov.rows() {
        return Err(DiagnosticsError::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    let n = a.cov.rows();
    let jit = c::<T>(jitter);
    let mut cov_a = a.cov.clone();
    let mut cov_b = b.cov.clone();
    for i in 0..n {
        cov_a[(i, i)] += jit;
        cov_b[(i, i)] += jit;
    }

    let root_a = psd_sqrt(&cov_a)?;
    let mut inner = root_a.matmul(&cov_b).matmul(&root_a);
    inner.symmetrize();
    let eig = sym_eig(&inner)?;
    // Tr(sqrt(inner)) without forming the square root matrix.
    let trace_sqrt: T = eig
        .eigenvalues
        .iter()
        .map(|&l| if l > T::zero() { l.sqrt() } else { T::zero() })
        .sum();

    let mean_dist: T = a
        .mean
        .iter()
        .zip(&b.mean)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum();
    let fid = mean_dist + cov_a.trace() + cov_b.trace() - c::<T>(2.0) * trace_sqrt;
    Ok(fid.max(T::zero()))
}

/// Argmax class tally over a sample batch; least-sampled ties break toward
/// the lowest class index.
pub fn mode_report<T: Scalar>(
    samples: &Matrix<T>,
    classifier: &Mlp<T>,
) -> Result<ModeReport, DiagnosticsError> {
    if samples.rows() == 0 {
        return Err(DiagnosticsError::EmptySamples);
    }
    let logits = classifier.forward(samples)?;
    let k = logits.cols();
    let mut counts = vec![0usize; k];
    for i in 0..logits.rows() {
        counts[argmax(logits.row(i))] += 1;
    }
    let mut least = 0usize;
    for (cls, &count) in counts.iter().enumerate() {
        if count < counts[least] {
            least = cls;
        }
    }
    Ok(ModeReport { least_sampled_class: least, least_count: counts[least], counts })
}

/// Pearson correlation between per-run conditioning and least-sampled-class
/// counts.
pub fn condition_mode_correlation<T: Scalar>(
    runs: &[(T, T)],
) -> Result<T, DiagnosticsError> {
    if runs.len() < 3 {
        return Err(DiagnosticsError::TooFewRuns { got: runs.len() });
    }
    let n = T::from_usize(runs.len()).unwrap();
    let mean_x = runs.iter().map(|&(x, _)| x).sum::<T>() / n;
    let mean_y = runs.iter().map(|&(_, y)| y).sum::<T>() / n;
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    let mut syy = T::zero();
    for &(x, y) in runs {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == T::zero() || syy == T::zero() {
        return Err(DiagnosticsError::DegenerateCorrelation);
    }
    Ok(sxy / (sxx * syy).sqrt())
}
