//! Binary network checkpoints.
//!
//! Layout: the magic string `SPECTRALAB1`, a little-endian `u32` count of
//! layer widths, the widths, one activation tag byte per layer, then the
//! parameter blob as little-endian `f64` in layer order with each layer's
//! weights (row-major) before its biases. Exact length is enforced.

use super::HarnessError;
use crate::linalg::Matrix;
use crate::nn::{Activation, Mlp};
use std::path::Path;

const MAGIC_PREFIX: &[u8] = b"SPECTRALAB";
const VERSION: u8 = b'1';

pub fn checkpoint_bytes(net: &Mlp<f64>) -> Vec<u8> {
    let mut bytes = Vec::new();
    bytes.extend_from_slice(MAGIC_PREFIX);
    bytes.push(VERSION);
    let dims = net.layer_dims();
    bytes.extend_from_slice(&(dims.len() as u32).to_le_bytes());
    for &d in dims {
        bytes.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for act in net.activations() {
        bytes.push(act.tag());
    }
    for k in 0..net.num_layers() {
        for &w in net.weights()[k].data() {
            bytes.extend_from_slice(&w.to_le_bytes());
        }
        for &b in &net.biases()[k] {
            bytes.extend_from_slice(&b.to_le_bytes());
        }
    }
    bytes
}

pub fn save_checkpoint(net: &Mlp<f64>, path: &Path) -> Result<(), HarnessError> {
    std::fs::write(path, checkpoint_bytes(net))
        .map_err(|e| HarnessError::Io { path: path.to_path_buf(), source: e })
}

pub fn load_checkpoint(path: &Path) -> Result<Mlp<f64>, HarnessError> {
    let bytes = std::fs::read(path)
        .map_err(|e| HarnessError::Io { path: path.to_path_buf(), source: e })?;
    checkpoint_from_bytes(&bytes)
}

pub fn checkpoint_from_bytes(bytes: &[u8]) -> Result<Mlp<f64>, HarnessError> {
    let mut cursor = Cursor { bytes, pos: 0 };
    let magic = cursor.take(MAGIC_PREFIX.len())?;
    if magic != MAGIC_PREFIX {
        return Err(HarnessError::CheckpointBadMagic);
    }
    let version = cursor.take(1)?[0];
    if version != VERSION {
        return Err(HarnessError::CheckpointVersionMismatch { got: version as char });
    }
    let dim_count = cursor.take_u32()? as usize;
    if dim_count < 2 {
        return Err(HarnessError::CheckpointShapeMismatch {
            what: format!("{dim_count} layer widths; a network needs at least 2"),
        });
    }
    let mut dims = Vec::with_capacity(dim_count);
    for _ in 0..dim_count {
        let d = cursor.take_u32()? as usize;
        if d == 0 {
            return Err(HarnessError::CheckpointShapeMismatch {
                what: "zero layer width".to_string(),
            });
        }
        dims.push(d);
    }
    let mut acts = Vec::with_capacity(dim_count - 1);
    for _ in 0..dim_count - 1 {
        let tag = cursor.take(1)?[0];
        let act = Activation::from_tag(tag)
            .ok_or(HarnessError::CheckpointBadActivation { tag })?;
        acts.push(act);
    }
    let mut weights = Vec::with_capacity(dim_count - 1);
    let mut biases = Vec::with_capacity(dim_count - 1);
    for k in 0..dim_count - 1 {
        let (rows, cols) = (dims[k + 1], dims[k]);
        let mut w = Matrix::zeros(rows, cols);
        for x in w.data_mut() {
            *x = cursor.take_f64()?;
        }
        let mut b = vec![0.0f64; rows];
        for x in &mut b {
            *x = cursor.take_f64()?;
        }
        weights.push(w);
        biases.push(b);
    }
    if cursor.pos != bytes.len() {
        return Err(HarnessError::CheckpointTrailingBytes {
            extra: bytes.len() - cursor.pos,
        });
    }
    Mlp::from_parts(dims, acts, weights, biases)
        .map_err(|e| HarnessError::CheckpointShapeMismatch { what: e.to_string() })
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], HarnessError> {
        if self.pos + n > self.bytes.len() {
            return Err(HarnessError::CheckpointTruncated {
                expected: self.pos + n,
                got: self.bytes.len(),
            });
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn take_u32(&mut self) -> Result<u32, HarnessError> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn take_f64(&mut self) -> Result<f64, HarnessError> {
        let b = self.take(8)?;
        Ok(f64::from_le_bytes([b[0], b[1], b[2], b[3], b[4], b[5], b[6], b[7]]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn sample_net() -> Mlp<f64> {
        Mlp::random_init(
            &[3, 8, 2],
            &[Activation::Tanh, Activation::Linear],
            0.5,
            &mut Rng::seeded(3, "ckpt"),
        )
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let net = sample_net();
        let bytes = checkpoint_bytes(&net);
        let loaded = checkpoint_from_bytes(&bytes).unwrap();
        assert_eq!(net, loaded);
    }

    #[test]
    fn bad_magic_rejected() {
        let mut bytes = checkpoint_bytes(&sample_net());
        bytes[0] = b'X';
        assert!(matches!(
            checkpoint_from_bytes(&bytes),
            Err(HarnessError::CheckpointBadMagic)
        ));
    }

    #[test]
    fn version_mismatch_distinct_from_bad_magic() {
        let mut bytes = checkpoint_bytes(&sample_net());
        bytes[MAGIC_PREFIX.len()] = b'2';
        assert!(matches!(
            checkpoint_from_bytes(&bytes),
            Err(HarnessError::CheckpointVersionMismatch { got: '2' })
        ));
    }

    #[test]
    fn truncation_detected() {
        let bytes = checkpoint_bytes(&sample_net());
        for cut in [bytes.len() - 1, bytes.len() - 9, 5, 14] {
            assert!(matches!(
                checkpoint_from_bytes(&bytes[..cut]),
                Err(HarnessError::CheckpointTruncated { .. })
            ));
        }
    }

    #[test]
    fn trailing_bytes_detected() {
        let mut bytes = checkpoint_bytes(&sample_net());
        bytes.push(0);
        assert!(matches!(
            checkpoint_from_bytes(&bytes),
            Err(HarnessError::CheckpointTrailingBytes { extra: 1 })
        ));
    }

    #[test]
    fn bad_activation_tag_detected() {
        let net = sample_net();
        let mut bytes = checkpoint_bytes(&net);
        // Activation tags sit after magic + count + dims.
        let tag_offset = MAGIC_PREFIX.len() + 1 + 4 + 4 * net.layer_dims().len();
        bytes[tag_offset] = 99;
        assert!(matches!(
            checkpoint_from_bytes(&bytes),
            Err(HarnessError::CheckpointBadActivation { tag: 99 })
        ));
    }

    #[test]
    fn file_roundtrip() {
        let net = sample_net();
        let path = std::env::temp_dir()
            .join(format!("spectralab-ckpt-{}.bin", std::process::id()));
        save_checkpoint(&net, &path).unwrap();
        let loaded = load_checkpoint(&path).unwrap();
        assert_eq!(net, loaded);
        std::fs::remove_file(&path).ok();
    }
}
