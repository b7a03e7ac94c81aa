//! Synthetic dataset generators, IDX image ingestion, and seeded latent
//! sampling.

mod idx;
mod ring;

pub use idx::load_idx;
pub use ring::{make_ring_dataset, ring_mode_centers};

use crate::linalg::Matrix;
use crate::rng::Rng;
use crate::scalar::{c, Scalar};

/// What the sample entries mean; selects the VAE likelihood and the
/// generator output head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    /// Low-dimensional point clouds (ring dataset).
    Planar,
    /// Image data scaled to [0, 1].
    Image,
}

/// A labeled sample matrix: one row per example.
#[derive(Debug, Clone)]
pub struct Dataset<T: Scalar> {
    pub samples: Matrix<T>,
    pub labels: Option<Vec<usize>>,
    pub num_classes: usize,
    pub name: String,
    pub kind: DataKind,
}

impl<T: Scalar> Dataset<T> {
    pub fn len(&self) -> usize {
        self.samples.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.rows() == 0
    }

    pub fn dim(&self) -> usize {
        self.samples.cols()
    }

    /// Validate the construction invariants; every constructor calls this.
    fn validate(&self) -> Result<(), DataError> {
        if let Some(labels) = &self.labels {
            if labels.len() != self.len() {
                return Err(DataError::InvalidParameter(format!(
                    "label count {} != sample count {}",
                    labels.len(),
                    self.len()
                )));
            }
            if labels.iter().any(|&l| l >= self.num_classes) {
                return Err(DataError::InvalidParameter(
                    "label out of class range".to_string(),
                ));
            }
        }
        if !self.samples.all_finite() {
            return Err(DataError::InvalidParameter("nonfinite sample entry".to_string()));
        }
        Ok(())
    }

    /// Rows at `indices` gathered into a batch.
    pub fn gather(&self, indices: &[usize]) -> Matrix<T> {
        let mut out = Matrix::zeros(indices.len(), self.dim());
        for (r, &i) in indices.iter().enumerate() {
            out.row_mut(r).copy_from_slice(self.samples.row(i));
        }
        out
    }
}

/// A batch of latent vectors with a provenance tag for logs.
#[derive(Debug, Clone)]
pub struct LatentBatch<T: Scalar> {
    pub z: Matrix<T>,
    pub provenance: String,
}

impl<T: Scalar> LatentBatch<T> {
    pub fn len(&self) -> usize {
        self.z.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.z.rows() == 0
    }

    pub fn dim(&self) -> usize {
        self.z.cols()
    }
}

/// Draw `b` i.i.d. standard-normal latent vectors from `rng`.
pub fn sample_latent<T: Scalar>(
    b: usize,
    n_z: usize,
    rng: &mut Rng,
    provenance: &str,
) -> Result<LatentBatch<T>, DataError> {
    if b < 1 || n_z < 1 {
        return Err(DataError::InvalidParameter(format!(
            "latent batch needs B >= 1 and n_z >= 1, got B={b}, n_z={n_z}"
        )));
    }
    let z = Matrix::from_fn(b, n_z, |_, _| c::<T>(rng.next_normal()));
    Ok(LatentBatch { z, provenance: provenance.to_string() })
}

/// Errors from dataset construction and ingestion.
#[derive(Debug)]
pub enum DataError {
    InvalidParameter(String),
    Io(std::io::Error),
    /// IDX header magic did not match the expected constant.
    BadMagic { what: &'static str, expected: u32, got: u32 },
    /// File ended before the declared payload.
    Truncated { what: &'static str, expected: usize, got: usize },
    /// Image and label files disagree on the example count.
    CountMismatch { images: usize, labels: usize },
}

impl std::fmt::Display for DataError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DataError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            DataError::Io(e) => write!(f, "io error: {e}"),
            DataError::BadMagic { what, expected, got } => {
                write!(f, "{what}: bad magic, expected {expected:#010x}, got {got:#010x}")
            }
            DataError::Truncated { what, expected, got } => {
                write!(f, "{what}: truncated, expected {expected} bytes, got {got}")
            }
            DataError::CountMismatch { images, labels } => {
                write!(f, "image/label count mismatch: {images} images vs {labels} labels")
            }
        }
    }
}

impl std::error::Error for DataError {}

impl From<std::io::Error> for DataError {
    fn from(e: std::io::Error) -> Self {
        DataError::Io(e)
    }
}
