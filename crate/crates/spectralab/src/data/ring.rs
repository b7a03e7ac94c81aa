//! Ring-of-Gaussians dataset: the desk-scale mode-collapse testbed.

use super::{DataError, DataKind, Dataset};
use crate::linalg::Matrix;
use crate::rng::Rng;
use crate::scalar::{c, Scalar};

/// Mode centers equally spaced on a circle, mode 0 at `(radius, 0)`.
pub fn ring_mode_centers<T: Scalar>(k: usize, radius: f64) -> Vec<[T; 2]> {
    (0..k)
        .map(|i| {
            let angle = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
            [c(radius * angle.cos()), c(radius * angle.sin())]
        })
        .collect()
}

/// `k` Gaussian modes on a circle; sample `j` belongs to mode `j % k`, so
/// per-mode counts differ by at most one.
pub fn make_ring_dataset<T: Scalar>(
    k: usize,
    n: usize,
    radius: f64,
    sigma: f64,
    rng: &mut Rng,
) -> Result<Dataset<T>, DataError> {
    if k < 2 {
        return Err(DataError::InvalidParameter(format!("ring needs K >= 2 modes, got {k}")));
    }
    if n < k {
        return Err(DataError::InvalidParameter(format!(
            "ring needs at least one sample per mode, got n={n} < K={k}"
        )));
    }
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(DataError::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    if radius.is_nan() || radius <= 0.0 {
        return Err(DataError::InvalidParameter(format!("radius must be positive, got {radius}")));
    }

    let centers = ring_mode_centers::<T>(k, radius);
    let mut samples = Matrix::zeros(n, 2);
    let mut labels = Vec::with_capacity(n);
    for j in 0..n {
        let mode = j % k;
        let row = samples.row_mut(j);
        row[0] = centers[mode][0] + c::<T>(sigma * rng.next_normal());
        row[1] = centers[mode][1] + c::<T>(sigma * rng.next_normal());
        labels.push(mode);
    }

    let ds = Dataset {
        samples,
        labels: Some(labels),
        num_classes: k,
        name: format!("ring{k}"),
        kind: DataKind::Planar,
    };
    ds.validate()?;
    Ok(ds)
}
