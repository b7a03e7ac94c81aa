//! The memorizing generator: a deliberately pathological generator trained
//! with an L2 reconstruction loss on a fixed z-to-sample pairing, half of
//! whose targets are copies of a single sample. No discriminator anywhere.

use super::ModelError;
use crate::data::Dataset;
use crate::linalg::Matrix;
use crate::nn::{Activation, AdamState, Mlp, DEFAULT_INIT_STD};
use crate::rng::Rng;
use crate::scalar::{c, Scalar};

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MemorizerConfig {
    /// Fraction of the pairing that maps to one duplicated sample.
    pub duplication_fraction: f64,
    /// Total number of fixed (z, x) pairs.
    pub n_pairs: usize,
    pub n_z: usize,
    pub hidden: Vec<usize>,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
}

impl Default for MemorizerConfig {
    fn default() -> Self {
        // A wide latent space keeps the fixed pairing easy to memorize and
        // leaves fresh latents far from every anchor, so unseen z values
        // extrapolate toward the duplicated sample instead of smoothly
        // interpolating across the data.
        MemorizerConfig {
            duplication_fraction: 0.5,
            n_pairs: 2000,
            n_z: 64,
            hidden: vec![128, 128],
            epochs: 1200,
            learning_rate: 3e-3,
            batch_size: 64,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MemorizerResult<T: Scalar> {
    pub generator: Mlp<T>,
    /// The frozen latent side of the pairing, one row per pair.
    pub latents: Matrix<T>,
    /// The target side, aligned row by row with `latents`.
    pub targets: Matrix<T>,
    /// Mean squared reconstruction error per epoch.
    pub epoch_losses: Vec<f64>,
}

impl<T: Scalar> MemorizerResult<T> {
    /// Root-mean-square of the per-pair reconstruction distance.
    pub fn reconstruction_rms(&self) -> Result<f64, ModelError> {
        let out = self.generator.forward(&self.latents)?;
        let n = self.latents.rows();
        let mut total = 0.0f64;
        for i in 0..n {
            let d: T = out
                .row(i)
                .iter()
                .zip(self.targets.row(i))
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum();
            total += d.to_f64();
        }
        Ok((total / n as f64).sqrt())
    }
}

/// Build the half-duplicated target set, freeze a seeded z-to-sample
/// pairing, and minimize mean squared reconstruction error over it.
pub fn train_memorizer<T: Scalar>(
    dataset: &Dataset<T>,
    cfg: &MemorizerConfig,
    rng: &mut Rng,
) -> Result<MemorizerResult<T>, ModelError> {
    if !(cfg.duplication_fraction > 0.0 && cfg.duplication_fraction < 1.0) {
        return Err(ModelError::InvalidParameter(format!(
            "duplication_fraction must be in (0, 1), got {}",
            cfg.duplication_fraction
        )));
    }
    if cfg.n_pairs == 0 {
        return Err(ModelError::InvalidParameter("n_pairs must be positive".to_string()));
    }
    let n_dup = ((cfg.n_pairs as f64) * cfg.duplication_fraction).round() as usize;
    let n_random = cfg.n_pairs - n_dup;
    if n_random > dataset.len() || dataset.is_empty() {
        return Err(ModelError::InvalidParameter(format!(
            "{n_random} distinct targets requested from a dataset of {}",
            dataset.len()
        )));
    }

    // Targets: n_dup copies of one sample, the rest sampled without
    // replacement; the arbitrary pairing is the construction order itself.
    let dup_index = rng.next_index(dataset.len());
    let mut pool: Vec<usize> = (0..dataset.len()).collect();
    rng.shuffle(&mut pool);
    let mut target_rows = Vec::with_capacity(cfg.n_pairs);
    for _ in 0..n_dup {
        target_rows.push(dup_index);
    }
    target_rows.extend_from_slice(&pool[..n_random]);
    let targets = dataset.gather(&target_rows);
    let latents = Matrix::from_fn(cfg.n_pairs, cfg.n_z, |_, _| c::<T>(rng.next_normal()));

    let mut dims = vec![cfg.n_z];
    dims.extend_from_slice(&cfg.hidden);
    dims.push(dataset.dim());
    let acts: Vec<Activation> = cfg
        .hidden
        .iter()
        .map(|_| Activation::Tanh)
        .chain([Activation::Linear])
        .collect();
    let mut generator = Mlp::<T>::random_init(&dims, &acts, DEFAULT_INIT_STD, rng);
    let mut opt = AdamState::new(&generator).with_learning_rate(cfg.learning_rate);

    let mut order: Vec<usize> = (0..cfg.n_pairs).collect();
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        rng.shuffle(&mut order);
        let mut epoch_loss = 0.0f64;
        let mut batches = 0usize;
        for chunk in order.chunks(cfg.batch_size) {
            let z = gather_rows(&latents, chunk);
            let x = gather_rows(&targets, chunk);
            let trace = generator.forward_trace(&z)?;
            let out = trace.output();
            let b = chunk.len();
            let inv_b = T::one() / T::from_usize(b).unwrap();
            let two = c::<T>(2.0);
            let mut upstream = Matrix::zeros(b, x.cols());
            let mut loss = T::zero();
            for i in 0..b {
                for j in 0..x.cols() {
                    let d = out[(i, j)] - x[(i, j)];
                    loss += d * d;
                    upstream[(i, j)] = two * d * inv_b;
                }
            }
            let loss = loss * inv_b;
            if !loss.is_finite() {
                return Err(ModelError::NonFiniteLoss {
                    step: epoch_losses.len() as u64,
                    l_d: 0.0,
                    l_g: loss.to_f64(),
                });
            }
            epoch_loss += loss.to_f64();
            batches += 1;
            let grads = generator.backward(&trace, &upstream)?.gradients;
            opt.step(&mut generator, &grads)?;
        }
        epoch_losses.push(epoch_loss / batches as f64);
    }

    Ok(MemorizerResult { generator, latents, targets, epoch_losses })
}

fn gather_rows<T: Scalar>(m: &Matrix<T>, indices: &[usize]) -> Matrix<T> {
    let mut out = Matrix::zeros(indices.len(), m.cols());
    for (r, &i) in indices.iter().enumerate() {
        out.row_mut(r).copy_from_slice(m.row(i));
    }
    out
}
