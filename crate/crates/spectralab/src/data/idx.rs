//! IDX file ingestion (the MNIST container format).
//!
//! Big-endian headers: magic `0x00000803` for images (count, rows, cols)
//! and `0x00000801` for labels (count), followed by raw `u8` payloads.

use super::{DataError, DataKind, Dataset};
use crate::linalg::Matrix;
use crate::scalar::{c, Scalar};
use std::path::Path;

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

/// Load an image/label IDX pair; pixels scale to `[0, 1]` and an optional
/// integer factor downscales by block averaging.
pub fn load_idx<T: Scalar>(
    images_path: &Path,
    labels_path: &Path,
    downscale: Option<usize>,
) -> Result<Dataset<T>, DataError> {
    let image_bytes = std::fs::read(images_path)?;
    let label_bytes = std::fs::read(labels_path)?;
    let (count, rows, cols, pixels) = parse_idx_images(&image_bytes)?;
    let labels = parse_idx_labels(&label_bytes)?;
    if labels.len() != count {
        return Err(DataError::CountMismatch { images: count, labels: labels.len() });
    }

    let factor = downscale.unwrap_or(1);
    if factor == 0 || rows % factor != 0 || cols % factor != 0 {
        return Err(DataError::InvalidParameter(format!(
            "downscale factor {factor} must evenly divide {rows}x{cols}"
        )));
    }
    let (out_rows, out_cols) = (rows / factor, cols / factor);
    let dim = out_rows * out_cols;

    let mut samples = Matrix::zeros(count, dim);
    let block = (factor * factor) as f64;
    for img in 0..count {
        let src = &pixels[img * rows * cols..(img + 1) * rows * cols];
        let dst = samples.row_mut(img);
        for r in 0..out_rows {
            for col in 0..out_cols {
                let mut acc = 0.0f64;
                for dr in 0..factor {
                    for dc in 0..factor {
                        acc += f64::from(src[(r * factor + dr) * cols + (col * factor + dc)]);
                    }
                }
                dst[r * out_cols + col] = c(acc / block / 255.0);
            }
        }
    }

    let num_classes = labels.iter().copied().max().map_or(0, |m| m + 1);
    let name = images_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "idx".to_string());
    let ds = Dataset {
        samples,
        labels: Some(labels),
        num_classes,
        name,
        kind: DataKind::Image,
    };
    ds.validate()?;
    Ok(ds)
}

/// Parse an IDX image payload: `(count, rows, cols, pixels)`.
pub fn parse_idx_images(bytes: &[u8]) -> Result<(usize, usize, usize, &[u8]), DataError> {
    if bytes.len() < 16 {
        return Err(DataError::Truncated { what: "idx image header", expected: 16, got: bytes.len() });
    }
    let magic = be_u32(&bytes[0..4]);
    if magic != IMAGE_MAGIC {
        return Err(DataError::BadMagic { what: "idx image file", expected: IMAGE_MAGIC, got: magic });
    }
    let count = be_u32(&bytes[4..8]) as usize;
    let rows = be_u32(&bytes[8..12]) as usize;
    let cols = be_u32(&bytes[12..16]) as usize;
    let expected = 16 + count * rows * cols;
    if bytes.len() != expected {
        return Err(DataError::Truncated { what: "idx image payload", expected, got: bytes.len() });
    }
    Ok((count, rows, cols, &bytes[16..]))
}

/// Parse an IDX label payload.
pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<usize>, DataError> {
    if bytes.len() < 8 {
        return Err(DataError::Truncated { what: "idx label header", expected: 8, got: bytes.len() });
    }
    let magic = be_u32(&bytes[0..4]);
    if magic != LABEL_MAGIC {
        return Err(DataError::BadMagic { what: "idx label file", expected: LABEL_MAGIC, got: magic });
    }
    let count = be_u32(&bytes[4..8]) as usize;
    let expected = 8 + count;
    if bytes.len() != expected {
        return Err(DataError::Truncated { what: "idx label payload", expected, got: bytes.len() });
    }
    Ok(bytes[8..].iter().map(|&b| b as usize).collect())
}

#[inline]
fn be_u32(b: &[u8]) -> u32 {
    u32::from_be_bytes([b[0], b[1], b[2], b[3]])
}
