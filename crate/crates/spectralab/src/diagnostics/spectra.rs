//! Metric-tensor and average-Jacobian spectra.

use super::DiagnosticsError;
use crate::data::LatentBatch;
use crate::linalg::{
    clamp_psd_eigenvalues, spectrum_report_from_values, sym_eig, LinalgError,
    Matrix, SpectrumReport,
};
use crate::nn::Mlp;
use crate::scalar::{c, Scalar};

/// Spectrum of the metric tensor `M_z = J_z^T J_z` at one latent point.
///
/// The summary statistics cover the structurally nonzero part of the
/// spectrum: a map into `n_x < n_z` dimensions has rank at most `n_x`, so
/// the trailing `n_z - n_x` eigenvalues are identically zero and would pin
/// every condition number at the floor. For `n_x >= n_z` this is the whole
/// spectrum.
pub fn metric_tensor_spectrum<T: Scalar>(
    generator: &Mlp<T>,
    z: &[T],
) -> Result<SpectrumReport<T>, DiagnosticsError> {
    let jac = generator.jacobian(z)?;
    let rank_bound = jac.rows().min(jac.cols());
    let mut metric = jac.matmul_transpose_a(&jac);
    metric.symmetrize();
    let eig = sym_eig(&metric)?;
    Ok(spectrum_report_from_values(&eig.eigenvalues[..rank_bound])?)
}

/// Mean log-condition number over a fixed probe batch, with the per-point
/// series. Degenerate points (all-zero Jacobians) are flagged and skipped,
/// not fatal.
#[derive(Debug, Clone)]
pub struct ConditionSummary<T: Scalar> {
    pub mean_log_condition: T,
    /// Log-condition per probe point, `None` where the spectrum degenerated.
    pub per_point: Vec<Option<T>>,
    /// Points where the eigenvalue floor was active.
    pub floored_points: usize,
    pub degenerate_points: usize,
}

pub fn mean_log_condition<T: Scalar>(
    generator: &Mlp<T>,
    probe: &LatentBatch<T>,
) -> Result<ConditionSummary<T>, DiagnosticsError> {
    if probe.is_empty() {
        return Err(DiagnosticsError::EmptyProbe);
    }
    let mut per_point = Vec::with_capacity(probe.len());
    let mut floored_points = 0;
    let mut degenerate_points = 0;
    let mut sum = T::zero();
    let mut counted = 0usize;
    for i in 0..probe.len() {
        match metric_tensor_spectrum(generator, probe.z.row(i)) {
            Ok(report) => {
                if report.floored {
                    floored_points += 1;
                }
                sum += report.log_condition;
                counted += 1;
                per_point.push(Some(report.log_condition));
            }
            Err(DiagnosticsError::Linalg(LinalgError::DegenerateSpectrum { .. })) => {
                degenerate_points += 1;
                per_point.push(None);
            }
            Err(e) => return Err(e),
        }
    }
    if counted == 0 {
        return Err(DiagnosticsError::AllPointsDegenerate);
    }
    Ok(ConditionSummary {
        mean_log_condition: sum / T::from_usize(counted).unwrap(),
        per_point,
        floored_points,
        degenerate_points,
    })
}

/// The averaged Jacobian `E_z[J_z]` over a probe batch.
pub fn average_jacobian<T: Scalar>(
    generator: &Mlp<T>,
    probe: &LatentBatch<T>,
) -> Result<Matrix<T>, DiagnosticsError> {
    if probe.is_empty() {
        return Err(DiagnosticsError::EmptyProbe);
    }
    let mut sum: Option<Matrix<T>> = None;
    for i in 0..probe.len() {
        let jac = generator.jacobian(probe.z.row(i))?;
        sum = Some(match sum {
            Some(acc) => acc.add(&jac),
            None => jac,
        });
    }
    Ok(sum.unwrap().scale(T::one() / T::from_usize(probe.len()).unwrap()))
}

/// Singular-value spectrum of the averaged Jacobian, descending.
///
/// The report's `eigenvalues` field holds the singular values themselves
/// (square roots of the Gram-matrix eigenvalues, truncated to the
/// structural rank bound `min(n_x, n_z)`); log-scale views come from
/// taking `ln` of those entries.
pub fn average_jacobian_spectrum<T: Scalar>(
    generator: &Mlp<T>,
    probe: &LatentBatch<T>,
) -> Result<SpectrumReport<T>, DiagnosticsError> {
    let avg = average_jacobian(generator, probe)?;
    let rank_bound = avg.rows().min(avg.cols());
    let mut gram = avg.matmul_transpose_a(&avg);
    gram.symmetrize();
    let eig = sym_eig(&gram)?;
    let singulars: Vec<T> = clamp_psd_eigenvalues(&eig.eigenvalues[..rank_bound])?
        .into_iter()
        .map(|x| x.sqrt())
        .collect();
    Ok(spectrum_report_from_values(&singulars)?)
}

/// Quotient series for the directional stretch limit along eigenvector `k`.
#[derive(Debug, Clone)]
pub struct DirectionalStretch<T: Scalar> {
    /// `|G(z) - G(z + eps v_k)| / eps` for each requested step.
    pub quotients: Vec<T>,
    /// The limit target `sqrt(lambda_k)`.
    pub sqrt_lambda: T,
}

/// Check the stretch limit: as `eps` shrinks, the perturbation quotient
/// along the k-th metric eigenvector approaches `sqrt(lambda_k)`.
pub fn directional_stretch_check<T: Scalar>(
    generator: &Mlp<T>,
    z: &[T],
    k: usize,
    steps: &[f64],
) -> Result<DirectionalStretch<T>, DiagnosticsError> {
    let jac = generator.jacobian(z)?;
    let mut metric = jac.matmul_transpose_a(&jac);
    metric.symmetrize();
    let eig = sym_eig(&metric)?;
    if k >= eig.eigenvalues.len() {
        return Err(DiagnosticsError::EigenIndexOutOfRange {
            index: k,
            dim: eig.eigenvalues.len(),
        });
    }
    let lambda = eig.eigenvalues[k];
    let v = eig.eigenvector(k);
    let base = generator.forward_vec(z)?;

    let mut quotients = Vec::with_capacity(steps.len());
    for &eps in steps {
        let eps_t = c::<T>(eps);
        let moved: Vec<T> = z.iter().zip(&v).map(|(&zi, &vi)| zi + eps_t * vi).collect();
        let out = generator.forward_vec(&moved)?;
        let dist = base
            .iter()
            .zip(&out)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<T>()
            .sqrt();
        quotients.push(dist / eps_t);
    }
    let lambda = if lambda < T::zero() { T::zero() } else { lambda };
    Ok(DirectionalStretch { quotients, sqrt_lambda: lambda.sqrt() })
}
