//! Symmetric eigendecomposition via cyclic Jacobi rotations.

use super::{LinalgError, Matrix};
use crate::scalar::{c, Scalar};

/// Maximum Jacobi sweeps before reporting non-convergence. The metric
/// tensors here are at most a few hundred wide; Jacobi converges in well
/// under 20 sweeps at that size.
const MAX_SWEEPS: usize = 64;

/// Relative off-diagonal Frobenius threshold for convergence.
const CONVERGENCE_RTOL: f64 = 1e-12;

/// Entry tolerance for the symmetry precondition.
const SYMMETRY_TOL: f64 = 1e-8;

/// Eigenvalues (descending) with the matching orthonormal eigenvectors as
/// matrix columns: column `k` of `eigenvectors` pairs with `eigenvalues[k]`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition<T: Scalar> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Matrix<T>,
}

impl<T: Scalar> EigenDecomposition<T> {
    /// Eigenvector for index `k` as a plain vector.
    pub fn eigenvector(&self, k: usize) -> Vec<T> {
        self.eigenvectors.col(k)
    }
}

/// Eigendecomposition of a symmetric matrix.
///
/// Cyclic-by-row Jacobi rotations, run until the off-diagonal Frobenius
/// norm falls below `1e-12` relative to the input norm. Eigenvalues come
/// back sorted descending with eigenvector columns permuted to match.
pub fn sym_eig<T: Scalar>(m: &Matrix<T>) -> Result<EigenDecomposition<T>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let gap = m.symmetry_gap().to_f64();
    if gap > SYMMETRY_TOL {
        return Err(LinalgError::NotSymmetric { gap });
    }
    let n = m.rows();
    if n == 0 {
        return Err(LinalgError::EmptySpectrum);
    }

    let mut a = m.clone();
    a.symmetrize();
    let mut v: Matrix<T> = Matrix::identity(n);

    let fro = a.frobenius_norm();
    let threshold = c::<T>(CONVERGENCE_RTOL) * fro;

    let mut converged = fro == T::zero();
    for _ in 0..MAX_SWEEPS {
        if converged || off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let (cos, sin) = rotation(a[(p, p)], a[(q, q)], apq);
                apply_rotation(&mut a, &mut v, p, q, cos, sin);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > threshold {
        return Err(LinalgError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    // Sort descending, permuting eigenvector columns alongside.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(j, j)].partial_cmp(&a[(i, i)]).expect("eigenvalues are finite")
    });
    let eigenvalues: Vec<T> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut eigenvectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            eigenvectors[(r, dst)] = v[(r, src)];
        }
    }

    Ok(EigenDecomposition { eigenvalues, eigenvectors })
}

/// Square root of a positive semi-definite matrix.
///
/// Computed through the eigendecomposition: `S = V diag(sqrt(lambda)) V^T`.
/// Eigenvalues in `[-1e-10, 0)` are treated as roundoff and clamped to
/// zero; anything more negative means the input was not PSD and is
/// rejected so caller bugs do not get silently smoothed over.
pub fn psd_sqrt<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    let eig = sym_eig(m)?;
    let roots = clamp_psd_eigenvalues(&eig.eigenvalues)?
        .into_iter()
        .map(|x| x.sqrt())
        .collect::<Vec<_>>();
    let n = eig.eigenvalues.len();
    // V * diag(roots), then times V^T.
    let mut scaled = eig.eigenvectors.clone();
    for i in 0..n {
        for j in 0..n {
            scaled[(i, j)] *= roots[j];
        }
    }
    let mut s = scaled.matmul_transpose_b(&eig.eigenvectors);
    s.symmetrize();
    Ok(s)
}

/// Clamp roundoff-negative eigenvalues of a claimed-PSD matrix to zero.
///
/// Values below `-1e-10` are a caller error, not roundoff.
pub fn clamp_psd_eigenvalues<T: Scalar>(eigenvalues: &[T]) -> Result<Vec<T>, LinalgError> {
    let tol = c::<T>(-1e-10);
    let mut out = Vec::with_capacity(eigenvalues.len());
    for &lambda in eigenvalues {
        if lambda < tol {
            return Err(LinalgError::NotPsd { min_eigenvalue: lambda.to_f64() });
        }
        out.push(if lambda < T::zero() { T::zero() } else { lambda });
    }
    Ok(out)
}

fn off_diagonal_norm<T: Scalar>(a: &Matrix<T>) -> T {
    let n = a.rows();
    let mut sum = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            let x = a[(i, j)];
            sum += (x * x) * c::<T>(2.0);
        }
    }
    sum.sqrt()
}

/// Rotation (cos, sin) annihilating the (p, q) entry.
fn rotation<T: Scalar>(app: T, aqq: T, apq: T) -> (T, T) {
    let tau = (aqq - app) / (apq * c::<T>(2.0));
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let cos = T::one() / (T::one() + t * t).sqrt();
    (cos, t * cos)
}

/// Two-sided update `A <- J^T A J`, `V <- V J` for the (p, q) plane.
fn apply_rotation<T: Scalar>(
    a: &mut Matrix<T>,
    v: &mut Matrix<T>,
    p: usize,
    q: usize,
    cos: T,
    sin: T,
) {
    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = cos * akp - sin * akq;
        a[(k, q)] = sin * akp + cos * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = cos * apk - sin * aqk;
        a[(q, k)] = sin * apk + cos * aqk;
    }
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = cos * vkp - sin * vkq;
        v[(k, q)] = sin * vkp + cos * vkq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn diag(entries: &[f64]) -> Matrix<f64> {
        let n = entries.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    fn random_symmetric(n: usize, rng: &mut Rng) -> Matrix<f64> {
        let mut m = Matrix::from_fn(n, n, |_, _| rng.next_normal());
        m.symmetrize();
        m
    }

    #[test]
    fn diagonal_input_is_exact() {
        let eig = sym_eig(&diag(&[4.0, 1.0])).unwrap();
        assert_eq!(eig.eigenvalues, vec![4.0, 1.0]);
        assert_eq!(eig.eigenvector(0), vec![1.0, 0.0]);
        assert_eq!(eig.eigenvector(1), vec![0.0, 1.0]);

        // Ascending diagonal must come back sorted descending.
        let eig = sym_eig(&diag(&[1.0, 4.0])).unwrap();
        assert_eq!(eig.eigenvalues, vec![4.0, 1.0]);
        assert_eq!(eig.eigenvector(0), vec![0.0, 1.0]);
    }

    #[test]
    fn identity_spectrum() {
        let eig = sym_eig(&Matrix::<f64>::identity(5)).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0; 5]);
    }

    #[test]
    fn residual_and_orthonormality() {
        let mut rng = Rng::seeded(11, "eig-test");
        for _ in 0..5 {
            let a = random_symmetric(4, &mut rng);
            let eig = sym_eig(&a).unwrap();
            let n = 4;

            // A v_k = lambda_k v_k within 1e-8 * ||A||_F.
            let tol = 1e-8 * a.frobenius_norm();
            for k in 0..n {
                let v = eig.eigenvector(k);
                let av = a.mul_vec(&v);
                for i in 0..n {
                    assert!((av[i] - eig.eigenvalues[k] * v[i]).abs() <= tol);
                }
            }

            // V^T V = I within 1e-8 per entry.
            let vtv = eig.eigenvectors.matmul_transpose_a(&eig.eigenvectors);
            for i in 0..n {
                for j in 0..n {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((vtv[(i, j)] - want).abs() < 1e-8);
                }
            }

            // Reconstruction V diag(lambda) V^T within 1e-8 relative Frobenius.
            let mut scaled = eig.eigenvectors.clone();
            for i in 0..n {
                for j in 0..n {
                    scaled[(i, j)] *= eig.eigenvalues[j];
                }
            }
            let recon = scaled.matmul_transpose_b(&eig.eigenvectors);
            let err = recon.sub(&a).frobenius_norm() / a.frobenius_norm();
            assert!(err < 1e-8, "reconstruction error {err}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let rect = Matrix::<f64>::zeros(2, 3);
        assert!(matches!(sym_eig(&rect), Err(LinalgError::NotSquare { .. })));

        let asym = Matrix::from_vec(2, 2, vec![1.0, 5.0, 0.0, 1.0]);
        assert!(matches!(sym_eig(&asym), Err(LinalgError::NotSymmetric { .. })));
    }

    #[test]
    fn zero_matrix_is_fine() {
        let eig = sym_eig(&Matrix::<f64>::zeros(3, 3)).unwrap();
        assert_eq!(eig.eigenvalues, vec![0.0; 3]);
    }

    #[test]
    fn psd_sqrt_diagonal() {
        let s = psd_sqrt(&diag(&[9.0, 4.0])).unwrap();
        assert!((s[(0, 0)] - 3.0).abs() < 1e-12);
        assert!((s[(1, 1)] - 2.0).abs() < 1e-12);
        assert!(s[(0, 1)].abs() < 1e-12);

        let id = psd_sqrt(&Matrix::<f64>::identity(4)).unwrap();
        assert!(id.sub(&Matrix::identity(4)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn psd_sqrt_reconstructs() {
        let mut rng = Rng::seeded(13, "psd-test");
        let a = Matrix::from_fn(3, 3, |_, _| rng.next_normal());
        let b = a.matmul_transpose_a(&a); // A^T A is PSD
        let s = psd_sqrt(&b).unwrap();
        let err = s.matmul(&s).sub(&b).frobenius_norm() / b.frobenius_norm();
        assert!(err < 1e-8, "sqrt reconstruction error {err}");
    }

    #[test]
    fn psd_sqrt_rejects_indefinite() {
        let m = diag(&[1.0, -0.5]);
        assert!(matches!(psd_sqrt(&m), Err(LinalgError::NotPsd { .. })));
    }

    #[test]
    fn psd_clamp_handles_roundoff() {
        let vals = clamp_psd_eigenvalues(&[2.0, -5e-11]).unwrap();
        assert_eq!(vals, vec![2.0, 0.0]);
    }
}
