//! Non-saturating GAN training with the optional Jacobian Clamping
//! penalty.

use super::ModelError;
use crate::data::{sample_latent, LatentBatch};
use crate::linalg::Matrix;
use crate::nn::{AdamState, Mlp};
use crate::rng::Rng;
use crate::scalar::{c, Scalar};

/// Clamping hyperparameters. Defaults: perturbation norm 1, target
/// quotient band [1, 20], disabled.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ClampConfig<T: Scalar> {
    pub epsilon: T,
    pub lambda_min: T,
    pub lambda_max: T,
    pub enabled: bool,
}

impl<T: Scalar> Default for ClampConfig<T> {
    fn default() -> Self {
        ClampConfig {
            epsilon: T::one(),
            lambda_min: T::one(),
            lambda_max: c(20.0),
            enabled: false,
        }
    }
}

impl<T: Scalar> ClampConfig<T> {
    pub fn enabled(mut self) -> Self {
        self.enabled = true;
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let band_ok = self.lambda_min > T::zero() && self.lambda_min <= self.lambda_max;
        if !band_ok {
            return Err(ModelError::InvalidParameter(format!(
                "need 0 < lambda_min <= lambda_max, got [{}, {}]",
                self.lambda_min, self.lambda_max
            )));
        }
        if self.epsilon.is_nan() || self.epsilon <= T::zero() {
            return Err(ModelError::InvalidParameter(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// How the norms in the quotient `Q = |G(z) - G(z')| / |z - z'|` are read:
/// row-wise per example (default) or as whole-batch Frobenius norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClampNormMode {
    #[default]
    PerExample,
    WholeBatch,
}

/// Penalty value plus the observed quotients (one per example, or a single
/// whole-batch quotient).
#[derive(Debug, Clone)]
pub struct ClampPenalty<T: Scalar> {
    pub penalty: T,
    pub quotients: Vec<T>,
}

/// Per-step training metrics.
#[derive(Debug, Clone, Copy)]
pub struct StepMetrics<T: Scalar> {
    pub l_d: T,
    pub l_g: T,
    pub clamp_penalty: T,
    pub q_mean: T,
    pub q_max: T,
}

impl<T: Scalar> StepMetrics<T> {
    fn all_finite(&self) -> bool {
        self.l_d.is_finite()
            && self.l_g.is_finite()
            && self.clamp_penalty.is_finite()
            && self.q_mean.is_finite()
            && self.q_max.is_finite()
    }
}

/// One GAN training run: both networks, their optimizer states, the fixed
/// conditioning probe, and an instrumented generator-forward counter.
#[derive(Debug, Clone)]
pub struct GanTrainState<T: Scalar> {
    pub generator: Mlp<T>,
    pub discriminator: Mlp<T>,
    pub gen_opt: AdamState<T>,
    pub disc_opt: AdamState<T>,
    pub step_count: u64,
    pub clamp: ClampConfig<T>,
    pub clamp_norm_mode: ClampNormMode,
    /// Fixed at run start and never resampled during the run.
    pub probe_batch: LatentBatch<T>,
    pub batch_size: usize,
    /// Total sample rows pushed through the generator by training steps.
    pub gen_forward_rows: u64,
}

impl<T: Scalar> GanTrainState<T> {
    pub fn new(
        generator: Mlp<T>,
        discriminator: Mlp<T>,
        clamp: ClampConfig<T>,
        clamp_norm_mode: ClampNormMode,
        probe_batch: LatentBatch<T>,
        batch_size: usize,
    ) -> Self {
        let gen_opt = AdamState::new(&generator);
        let disc_opt = AdamState::new(&discriminator);
        GanTrainState {
            generator,
            discriminator,
            gen_opt,
            disc_opt,
            step_count: 0,
            clamp,
            clamp_norm_mode,
            probe_batch,
            batch_size,
            gen_forward_rows: 0,
        }
    }

    pub fn latent_dim(&self) -> usize {
        self.generator.input_dim()
    }
}

#[inline]
fn softplus<T: Scalar>(x: T) -> T {
    // max(x, 0) + ln(1 + exp(-|x|)), stable on both tails.
    let zero = T::zero();
    let m = if x > zero { x } else { zero };
    m + (-x.abs()).exp().ln_1p()
}

#[inline]
fn sigmoid<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

/// Discriminator and generator losses from logits.
///
/// `L_D = -E[log D(x)] - E[log(1 - D(G(z)))]` and the non-saturating
/// `L_G = -E[log D(G(z))]`, both evaluated in softplus form so extreme
/// logits cannot produce `log(0)`.
pub fn gan_losses<T: Scalar>(
    d_real_logits: &[T],
    d_fake_logits: &[T],
) -> Result<(T, T), ModelError> {
    if d_real_logits.is_empty() || d_fake_logits.is_empty() {
        return Err(ModelError::EmptyBatch);
    }
    if d_real_logits.iter().chain(d_fake_logits).any(|x| !x.is_finite()) {
        return Err(ModelError::InvalidParameter("nonfinite logit".to_string()));
    }
    let inv_r = T::one() / T::from_usize(d_real_logits.len()).unwrap();
    let inv_f = T::one() / T::from_usize(d_fake_logits.len()).unwrap();
    let real_term: T = d_real_logits.iter().map(|&l| softplus(-l)).sum::<T>() * inv_r;
    let fake_term: T = d_fake_logits.iter().map(|&l| softplus(l)).sum::<T>() * inv_f;
    let gen_term: T = d_fake_logits.iter().map(|&l| softplus(-l)).sum::<T>() * inv_f;
    Ok((real_term + fake_term, gen_term))
}

/// Per-example penalty pieces for a quotient.
#[inline]
fn quotient_penalty<T: Scalar>(q: T, cfg: &ClampConfig<T>) -> T {
    let over = if q > cfg.lambda_max { q - cfg.lambda_max } else { T::zero() };
    let under = if q < cfg.lambda_min { q - cfg.lambda_min } else { T::zero() };
    over * over + under * under
}

/// `d penalty / d q` for one quotient (without batch averaging).
#[inline]
fn quotient_penalty_grad<T: Scalar>(q: T, cfg: &ClampConfig<T>) -> T {
    let two = c::<T>(2.0);
    if q > cfg.lambda_max {
        two * (q - cfg.lambda_max)
    } else if q < cfg.lambda_min {
        two * (q - cfg.lambda_min)
    } else {
        T::zero()
    }
}

/// Draw the perturbation batch: Gaussian rows scaled to norm `epsilon`
/// (per row, or by whole-batch Frobenius norm). Zero-norm draws are
/// resampled; they have probability zero but would divide by zero.
fn sample_perturbation<T: Scalar>(
    b: usize,
    n_z: usize,
    epsilon: T,
    mode: ClampNormMode,
    rng: &mut Rng,
) -> Matrix<T> {
    loop {
        let mut delta = Matrix::from_fn(b, n_z, |_, _| c::<T>(rng.next_normal()));
        match mode {
            ClampNormMode::PerExample => {
                let mut ok = true;
                for i in 0..b {
                    let row = delta.row_mut(i);
                    let norm = row.iter().map(|&x| x * x).sum::<T>().sqrt();
                    if norm == T::zero() {
                        ok = false;
                        break;
                    }
                    let scale = epsilon / norm;
                    for x in row {
                        *x *= scale;
                    }
                }
                if ok {
                    return delta;
                }
            }
            ClampNormMode::WholeBatch => {
                let norm = delta.frobenius_norm();
                if norm > T::zero() {
                    return delta.scale(epsilon / norm);
                }
            }
        }
    }
}

/// Quotients and penalty from the two generator output batches.
fn penalty_from_outputs<T: Scalar>(
    out_z: &Matrix<T>,
    out_zp: &Matrix<T>,
    cfg: &ClampConfig<T>,
    mode: ClampNormMode,
) -> ClampPenalty<T> {
    let diff = out_z.sub(out_zp);
    match mode {
        ClampNormMode::PerExample => {
            let b = diff.rows();
            let mut quotients = Vec::with_capacity(b);
            let mut total = T::zero();
            for i in 0..b {
                let norm = diff.row(i).iter().map(|&x| x * x).sum::<T>().sqrt();
                let q = norm / cfg.epsilon;
                total += quotient_penalty(q, cfg);
                quotients.push(q);
            }
            let penalty = total / T::from_usize(b).unwrap();
            ClampPenalty { penalty, quotients }
        }
        ClampNormMode::WholeBatch => {
            let q = diff.frobenius_norm() / cfg.epsilon;
            ClampPenalty { penalty: quotient_penalty(q, cfg), quotients: vec![q] }
        }
    }
}

/// Jacobian Clamping penalty for a latent batch.
///
/// Per example: `z' = z + delta` with `delta` Gaussian scaled to norm
/// `epsilon`, `Q = |G(z) - G(z')| / |z - z'|`, and the penalty is the mean
/// of `(max(Q, lambda_max) - lambda_max)^2 + (min(Q, lambda_min) -
/// lambda_min)^2`. It is zero exactly when every quotient lies inside
/// `[lambda_min, lambda_max]`.
pub fn jacobian_clamping_penalty<T: Scalar>(
    generator: &Mlp<T>,
    z: &LatentBatch<T>,
    cfg: &ClampConfig<T>,
    mode: ClampNormMode,
    rng: &mut Rng,
) -> Result<ClampPenalty<T>, ModelError> {
    if !cfg.enabled {
        return Err(ModelError::ClampDisabled);
    }
    cfg.validate()?;
    if z.is_empty() {
        return Err(ModelError::EmptyBatch);
    }
    let delta = sample_perturbation(z.len(), z.dim(), cfg.epsilon, mode, rng);
    let z_prime = z.z.add(&delta);
    let out_z = generator.forward(&z.z)?;
    let out_zp = generator.forward(&z_prime)?;
    Ok(penalty_from_outputs(&out_z, &out_zp, cfg, mode))
}

/// One alternating GAN step: a discriminator Adam update on `L_D`, then a
/// generator Adam update on `L_G` plus the clamping penalty when enabled.
///
/// With clamping on, the generator consumes the latent batch and its
/// perturbed copy in a single doubled batch, so generator forward cost per
/// step is exactly twice the disabled cost (see `gen_forward_rows`).
pub fn gan_train_step<T: Scalar>(
    state: &mut GanTrainState<T>,
    real_batch: &Matrix<T>,
    latent_rng: &mut Rng,
    clamp_rng: &mut Rng,
) -> Result<StepMetrics<T>, ModelError> {
    let b = state.batch_size;
    if real_batch.rows() != b {
        return Err(ModelError::WrongBatchSize { expected: b, got: real_batch.rows() });
    }
    let n_z = state.latent_dim();
    let z = sample_latent::<T>(b, n_z, latent_rng, "step")?;

    let clamping = state.clamp.enabled;
    let gen_input = if clamping {
        state.clamp.validate()?;
        let delta =
            sample_perturbation(b, n_z, state.clamp.epsilon, state.clamp_norm_mode, clamp_rng);
        // The perturbation is a stop-gradient constant; only the two
        // generator outputs carry gradients.
        Matrix::vstack(&z.z, &z.z.add(&delta))
    } else {
        z.z.clone()
    };

    let gen_trace = state.generator.forward_trace(&gen_input)?;
    state.gen_forward_rows += gen_input.rows() as u64;
    let fake = gen_trace.output().row_slice(0, b);

    // Discriminator update on L_D.
    let real_trace = state.discriminator.forward_trace(real_batch)?;
    let fake_trace = state.discriminator.forward_trace(&fake)?;
    let real_logits = real_trace.output().col(0);
    let fake_logits = fake_trace.output().col(0);
    let (l_d, _) = gan_losses(&real_logits, &fake_logits)?;

    let inv_b = T::one() / T::from_usize(b).unwrap();
    let up_real = Matrix::from_fn(b, 1, |i, _| -sigmoid(-real_logits[i]) * inv_b);
    let up_fake = Matrix::from_fn(b, 1, |i, _| sigmoid(fake_logits[i]) * inv_b);
    let mut d_grads = state.discriminator.backward(&real_trace, &up_real)?.gradients;
    d_grads.add_assign(&state.discriminator.backward(&fake_trace, &up_fake)?.gradients);
    state.disc_opt.step(&mut state.discriminator, &d_grads)?;

    // Generator update on L_G (+ penalty) through the updated discriminator.
    let fake_trace = state.discriminator.forward_trace(&fake)?;
    let fake_logits = fake_trace.output().col(0);
    let l_g: T = fake_logits.iter().map(|&l| softplus(-l)).sum::<T>() * inv_b;
    let up_gen = Matrix::from_fn(b, 1, |i, _| -sigmoid(-fake_logits[i]) * inv_b);
    let d_input_grad = state.discriminator.backward(&fake_trace, &up_gen)?.input_gradient;

    let (upstream, clamp_metrics) = if clamping {
        let out_z = fake;
        let out_zp = gen_trace.output().row_slice(b, 2 * b);
        let pen = penalty_from_outputs(&out_z, &out_zp, &state.clamp, state.clamp_norm_mode);
        let diff = out_z.sub(&out_zp);
        // d penalty / d G(z) rows; the perturbed half gets the negation.
        let mut pen_grad = Matrix::zeros(b, diff.cols());
        match state.clamp_norm_mode {
            ClampNormMode::PerExample => {
                for i in 0..b {
                    let q = pen.quotients[i];
                    let dq = quotient_penalty_grad(q, &state.clamp) * inv_b;
                    let norm = q * state.clamp.epsilon;
                    // Zero diff means the quotient sits at the norm's kink;
                    // use the zero subgradient.
                    if dq != T::zero() && norm > T::zero() {
                        let scale = dq / (state.clamp.epsilon * norm);
                        for (g, &d) in pen_grad.row_mut(i).iter_mut().zip(diff.row(i)) {
                            *g = scale * d;
                        }
                    }
                }
            }
            ClampNormMode::WholeBatch => {
                let q = pen.quotients[0];
                let dq = quotient_penalty_grad(q, &state.clamp);
                let norm = q * state.clamp.epsilon;
                if dq != T::zero() && norm > T::zero() {
                    let scale = dq / (state.clamp.epsilon * norm);
                    for (g, &d) in pen_grad.data_mut().iter_mut().zip(diff.data()) {
                        *g = scale * d;
                    }
                }
            }
        }
        let up_z = d_input_grad.add(&pen_grad);
        let up_zp = pen_grad.scale(-T::one());
        (Matrix::vstack(&up_z, &up_zp), Some(pen))
    } else {
        (d_input_grad, None)
    };

    let g_grads = state.generator.backward(&gen_trace, &upstream)?.gradients;
    state.gen_opt.step(&mut state.generator, &g_grads)?;
    state.step_count += 1;

    let metrics = match clamp_metrics {
        Some(pen) => {
            let n = T::from_usize(pen.quotients.len()).unwrap();
            let q_mean = pen.quotients.iter().copied().sum::<T>() / n;
            let q_max = pen.quotients.iter().copied().fold(T::zero(), T::max);
            StepMetrics { l_d, l_g, clamp_penalty: pen.penalty, q_mean, q_max }
        }
        None => StepMetrics {
            l_d,
            l_g,
            clamp_penalty: T::zero(),
            q_mean: T::zero(),
            q_max: T::zero(),
        },
    };
    if !metrics.all_finite() {
        return Err(ModelError::NonFiniteLoss {
            step: state.step_count,
            l_d: metrics.l_d.to_f64(),
            l_g: metrics.l_g.to_f64(),
        });
    }
    Ok(metrics)
}
