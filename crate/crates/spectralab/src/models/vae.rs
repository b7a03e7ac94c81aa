//! Variational autoencoder baseline.
//!
//! The decoder mirrors the GAN generator architecture and takes N(0, I)
//! noise, so its average-Jacobian spectrum is directly comparable to the
//! generator's. Training maximizes the usual ELBO with a diagonal-Gaussian
//! encoder: unit-variance Gaussian likelihood for planar data, Bernoulli
//! likelihood for [0, 1] image data.

use super::ModelError;
use crate::data::{DataKind, Dataset};
use crate::linalg::Matrix;
use crate::nn::{Activation, AdamState, Mlp, DEFAULT_INIT_STD};
use crate::rng::Rng;
use crate::scalar::{c, Scalar};

const VAE_LEARNING_RATE: f64 = 1e-3;
const VAE_BATCH: usize = 64;

#[derive(Debug, Clone)]
pub struct VaeTrainResult<T: Scalar> {
    /// Decoder with the same shape as the GAN generator; for image data the
    /// training-time logits head is swapped for the sigmoid head.
    pub decoder: Mlp<T>,
    /// Mean negative ELBO per epoch (training objective; lower is better).
    pub epoch_losses: Vec<f64>,
}

/// KL divergence of a diagonal Gaussian `N(mu, exp(logvar))` from `N(0, I)`.
pub fn gaussian_kl<T: Scalar>(mu: &[T], logvar: &[T]) -> T {
    let half = c::<T>(0.5);
    mu.iter()
        .zip(logvar)
        .map(|(&m, &lv)| half * (m * m + lv.exp() - lv - T::one()))
        .sum()
}

/// Train the VAE and return its decoder.
pub fn train_vae<T: Scalar>(
    dataset: &Dataset<T>,
    n_z: usize,
    hidden: &[usize],
    epochs: usize,
    rng: &mut Rng,
) -> Result<VaeTrainResult<T>, ModelError> {
    if n_z == 0 || hidden.is_empty() {
        return Err(ModelError::InvalidParameter(
            "vae needs n_z >= 1 and at least one hidden layer".to_string(),
        ));
    }
    if dataset.is_empty() {
        return Err(ModelError::EmptyBatch);
    }
    let n_x = dataset.dim();

    // Encoder emits [mu, logvar] side by side.
    let mut enc_dims = vec![n_x];
    enc_dims.extend_from_slice(hidden);
    enc_dims.push(2 * n_z);
    let enc_acts: Vec<Activation> = hidden
        .iter()
        .map(|_| Activation::Tanh)
        .chain([Activation::Linear])
        .collect();

    let mut dec_dims = vec![n_z];
    dec_dims.extend_from_slice(hidden);
    dec_dims.push(n_x);
    // Image decoders train on logits; the sigmoid head is attached at the end.
    let dec_acts: Vec<Activation> = hidden
        .iter()
        .map(|_| Activation::Tanh)
        .chain([Activation::Linear])
        .collect();

    let mut encoder = Mlp::<T>::random_init(&enc_dims, &enc_acts, DEFAULT_INIT_STD, rng);
    let mut decoder = Mlp::<T>::random_init(&dec_dims, &dec_acts, DEFAULT_INIT_STD, rng);
    let mut enc_opt = AdamState::new(&encoder).with_learning_rate(VAE_LEARNING_RATE);
    let mut dec_opt = AdamState::new(&decoder).with_learning_rate(VAE_LEARNING_RATE);

    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let mut epoch_losses = Vec::with_capacity(epochs);
    let half = c::<T>(0.5);

    for _ in 0..epochs {
        rng.shuffle(&mut order);
        let mut epoch_loss = 0.0f64;
        let mut batches = 0usize;
        for chunk in order.chunks(VAE_BATCH) {
            let x = dataset.gather(chunk);
            let b = chunk.len();
            let inv_b = T::one() / T::from_usize(b).unwrap();

            let enc_trace = encoder.forward_trace(&x)?;
            let enc_out = enc_trace.output();
            let mut mu = Matrix::zeros(b, n_z);
            let mut logvar = Matrix::zeros(b, n_z);
            for i in 0..b {
                let row = enc_out.row(i);
                mu.row_mut(i).copy_from_slice(&row[..n_z]);
                logvar.row_mut(i).copy_from_slice(&row[n_z..]);
            }

            // Reparameterized sample z = mu + exp(logvar / 2) * eps.
            let eps = Matrix::from_fn(b, n_z, |_, _| c::<T>(rng.next_normal()));
            let mut z = Matrix::zeros(b, n_z);
            for i in 0..b {
                for j in 0..n_z {
                    z[(i, j)] = mu[(i, j)] + (logvar[(i, j)] * half).exp() * eps[(i, j)];
                }
            }

            let dec_trace = decoder.forward_trace(&z)?;
            let x_hat = dec_trace.output();

            // Reconstruction loss and its gradient w.r.t. the decoder output.
            let mut recon = T::zero();
            let mut d_xhat = Matrix::zeros(b, n_x);
            match dataset.kind {
                DataKind::Planar => {
                    for i in 0..b {
                        for j in 0..n_x {
                            let d = x_hat[(i, j)] - x[(i, j)];
                            recon += half * d * d;
                            d_xhat[(i, j)] = d * inv_b;
                        }
                    }
                }
                DataKind::Image => {
                    // Bernoulli negative log-likelihood on logits.
                    for i in 0..b {
                        for j in 0..n_x {
                            let logit = x_hat[(i, j)];
                            let target = x[(i, j)];
                            let sp = if logit > T::zero() {
                                logit + (-logit).exp().ln_1p()
                            } else {
                                (logit.exp()).ln_1p()
                            };
                            recon += sp - logit * target;
                            let sig = T::one() / (T::one() + (-logit).exp());
                            d_xhat[(i, j)] = (sig - target) * inv_b;
                        }
                    }
                }
            }

            let mut kl = T::zero();
            for i in 0..b {
                kl += gaussian_kl(mu.row(i), logvar.row(i));
            }
            let loss = (recon + kl) * inv_b;
            if !loss.is_finite() {
                return Err(ModelError::NonFiniteLoss {
                    step: epoch_losses.len() as u64,
                    l_d: 0.0,
                    l_g: loss.to_f64(),
                });
            }
            epoch_loss += loss.to_f64();
            batches += 1;

            // Backprop: decoder, then the reparameterization, then KL.
            let dec_back = decoder.backward(&dec_trace, &d_xhat)?;
            let dz = dec_back.input_gradient;
            let mut enc_upstream = Matrix::zeros(b, 2 * n_z);
            for i in 0..b {
                for j in 0..n_z {
                    let sigma_eps = z[(i, j)] - mu[(i, j)];
                    let d_mu = dz[(i, j)] + mu[(i, j)] * inv_b;
                    let d_lv =
                        dz[(i, j)] * sigma_eps * half + half * (logvar[(i, j)].exp() - T::one()) * inv_b;
                    enc_upstream[(i, j)] = d_mu;
                    enc_upstream[(i, j + n_z)] = d_lv;
                }
            }
            let enc_grads = encoder.backward(&enc_trace, &enc_upstream)?.gradients;
            dec_opt.step(&mut decoder, &dec_back.gradients)?;
            enc_opt.step(&mut encoder, &enc_grads)?;
        }
        epoch_losses.push(epoch_loss / batches as f64);
    }

    let decoder = match dataset.kind {
        DataKind::Planar => decoder,
        DataKind::Image => decoder.with_output_activation(Activation::Sigmoid),
    };
    Ok(VaeTrainResult { decoder, epoch_losses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::make_ring_dataset;

    #[test]
    fn kl_of_standard_normal_is_zero() {
        let mu = [0.0f64; 4];
        let logvar = [0.0f64; 4];
        assert_eq!(gaussian_kl(&mu, &logvar), 0.0);
    }

    #[test]
    fn kl_is_positive_off_origin() {
        assert!(gaussian_kl(&[1.0f64], &[0.0]) > 0.0);
        assert!(gaussian_kl(&[0.0f64], &[1.5]) > 0.0);
        assert!(gaussian_kl(&[0.0f64], &[-1.5]) > 0.0);
    }

    #[test]
    fn elbo_improves_from_first_epoch() {
        let ds =
            make_ring_dataset::<f64>(8, 2000, 2.0, 0.02, &mut Rng::seeded(1, "vae-data")).unwrap();
        let res = train_vae(&ds, 8, &[64, 64], 10, &mut Rng::seeded(2, "vae-train")).unwrap();
        assert_eq!(res.epoch_losses.len(), 10);
        let best_later = res.epoch_losses[1..].iter().copied().fold(f64::INFINITY, f64::min);
        assert!(
            best_later < res.epoch_losses[0],
            "losses {:?}",
            res.epoch_losses
        );
    }

    #[test]
    fn decoder_shape_matches_generator_family() {
        let ds =
            make_ring_dataset::<f64>(4, 500, 2.0, 0.05, &mut Rng::seeded(3, "vae-data")).unwrap();
        let res = train_vae(&ds, 8, &[64, 64], 1, &mut Rng::seeded(4, "vae-train")).unwrap();
        assert_eq!(res.decoder.layer_dims(), &[8, 64, 64, 2]);
    }

    #[test]
    fn seeded_vae_is_deterministic() {
        let ds =
            make_ring_dataset::<f64>(4, 400, 2.0, 0.05, &mut Rng::seeded(5, "vae-data")).unwrap();
        let a = train_vae(&ds, 4, &[32], 1, &mut Rng::seeded(6, "vae-train")).unwrap();
        let b = train_vae(&ds, 4, &[32], 1, &mut Rng::seeded(6, "vae-train")).unwrap();
        assert_eq!(a.decoder, b.decoder);
        assert_eq!(a.epoch_losses, b.epoch_losses);
    }
}
