//! Adam optimizer with bias correction.

use super::{Gradients, Mlp, NnError};
use crate::linalg::Matrix;
use crate::scalar::{c, Scalar};

/// Default hyperparameters follow the DCGAN convention.
pub const DEFAULT_LEARNING_RATE: f64 = 2e-4;
pub const DEFAULT_BETA1: f64 = 0.5;
pub const DEFAULT_BETA2: f64 = 0.999;
pub const DEFAULT_EPSILON: f64 = 1e-8;

/// Optimizer state: first/second moment estimates shaped like the network.
#[derive(Debug, Clone)]
pub struct AdamState<T: Scalar> {
    first_moment: Gradients<T>,
    second_moment: Gradients<T>,
    step_count: u64,
    pub learning_rate: T,
    pub beta1: T,
    pub beta2: T,
    pub epsilon_hat: T,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(net: &Mlp<T>) -> Self {
        AdamState {
            first_moment: Gradients::zeros_like(net),
            second_moment: Gradients::zeros_like(net),
            step_count: 0,
            learning_rate: c(DEFAULT_LEARNING_RATE),
            beta1: c(DEFAULT_BETA1),
            beta2: c(DEFAULT_BETA2),
            epsilon_hat: c(DEFAULT_EPSILON),
        }
    }

    pub fn with_learning_rate(mut self, lr: f64) -> Self {
        self.learning_rate = c(lr);
        self
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    /// One Adam update. Rejects nonfinite gradients by name so a diverging
    /// run aborts with a pointer at the offending parameter.
    pub fn step(&mut self, params: &mut Mlp<T>, grads: &Gradients<T>) -> Result<(), NnError> {
        if grads.weights.len() != params.num_layers() {
            return Err(NnError::DimensionMismatch {
                what: "gradient layer count",
                expected: params.num_layers(),
                got: grads.weights.len(),
            });
        }
        for (k, (w, g)) in params.weights().iter().zip(&grads.weights).enumerate() {
            if (w.rows(), w.cols()) != (g.rows(), g.cols()) {
                return Err(NnError::DimensionMismatch {
                    what: "weight gradient shape",
                    expected: w.rows() * w.cols(),
                    got: g.rows() * g.cols(),
                });
            }
            if !g.all_finite() {
                return Err(NnError::NonFiniteGradient { param: format!("layer {k} weights") });
            }
            if !grads.biases[k].iter().all(|x| x.is_finite()) {
                return Err(NnError::NonFiniteGradient { param: format!("layer {k} biases") });
            }
        }

        self.step_count += 1;
        let t = self.step_count;
        let bias1 = T::one() - self.beta1.powi(t as i32);
        let bias2 = T::one() - self.beta2.powi(t as i32);
        let (b1, b2) = (self.beta1, self.beta2);
        let (lr, eps) = (self.learning_rate, self.epsilon_hat);

        let update = |p: &mut T, g: T, m: &mut T, v: &mut T| {
            *m = b1 * *m + (T::one() - b1) * g;
            *v = b2 * *v + (T::one() - b2) * g * g;
            let m_hat = *m / bias1;
            let v_hat = *v / bias2;
            *p -= lr * m_hat / (v_hat.sqrt() + eps);
        };

        for k in 0..params.num_layers() {
            let g: &Matrix<T> = &grads.weights[k];
            let m = self.first_moment.weights[k].data_mut();
            let v = self.second_moment.weights[k].data_mut();
            for (((p, &gi), mi), vi) in params.weights_mut()[k]
                .data_mut()
                .iter_mut()
                .zip(g.data())
                .zip(m.iter_mut())
                .zip(v.iter_mut())
            {
                update(p, gi, mi, vi);
            }
            for (((p, &gi), mi), vi) in params.biases_mut()[k]
                .iter_mut()
                .zip(&grads.biases[k])
                .zip(self.first_moment.biases[k].iter_mut())
                .zip(self.second_moment.biases[k].iter_mut())
            {
                update(p, gi, mi, vi);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Activation;
    use crate::rng::Rng;

    fn scalar_net(w: f64) -> Mlp<f64> {
        let mut net = Mlp::zeros(&[1, 1], &[Activation::Linear]);
        net.weights_mut()[0] = Matrix::from_vec(1, 1, vec![w]);
        net
    }

    fn scalar_grad(net: &Mlp<f64>, g: f64) -> Gradients<f64> {
        let mut grads = Gradients::zeros_like(net);
        grads.weights[0] = Matrix::from_vec(1, 1, vec![g]);
        grads
    }

    #[test]
    fn zero_gradient_leaves_params() {
        let mut rng = Rng::seeded(2, "adam");
        let mut net =
            Mlp::<f64>::random_init(&[2, 3, 1], &[Activation::Tanh, Activation::Linear], 0.1, &mut rng);
        let before = net.clone();
        let zero = Gradients::zeros_like(&net);
        let mut state = AdamState::new(&net);
        state.step(&mut net, &zero).unwrap();
        assert_eq!(net, before);
        assert_eq!(state.step_count(), 1);
    }

    #[test]
    fn first_step_moves_against_gradient_sign() {
        let mut net = scalar_net(1.0);
        let grad = scalar_grad(&net, 0.25);
        let mut state = AdamState::new(&net);
        state.step(&mut net, &grad).unwrap();
        // First bias-corrected step is ~ -lr * g / |g|.
        let expected = 1.0 - 2e-4 * 0.25 / (0.25 + 1e-8);
        assert!((net.weights()[0][(0, 0)] - expected).abs() < 1e-12);
    }

    #[test]
    fn two_steps_match_hand_rollout() {
        let (lr, b1, b2, eps) = (2e-4f64, 0.5f64, 0.999f64, 1e-8f64);
        let gradients = [0.3, -0.1];
        // Hand-rolled sequential application of the update equations.
        let (mut p, mut m, mut v) = (2.0, 0.0, 0.0);
        for (i, &g) in gradients.iter().enumerate() {
            let t = (i + 1) as i32;
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g * g;
            let m_hat = m / (1.0 - b1.powi(t));
            let v_hat: f64 = v / (1.0 - b2.powi(t));
            p -= lr * m_hat / (v_hat.sqrt() + eps);
        }

        let mut net = scalar_net(2.0);
        let mut state = AdamState::new(&net);
        for &g in &gradients {
            let grad = scalar_grad(&net, g);
            state.step(&mut net, &grad).unwrap();
        }
        assert!((net.weights()[0][(0, 0)] - p).abs() < 1e-15);
    }

    #[test]
    fn nonfinite_gradient_is_named() {
        let mut net = scalar_net(1.0);
        let grad = scalar_grad(&net, f64::NAN);
        let mut state = AdamState::new(&net);
        let err = state.step(&mut net, &grad).unwrap_err();
        match err {
            NnError::NonFiniteGradient { param } => assert!(param.contains("layer 0")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let mut net = scalar_net(1.0);
        let other = Mlp::<f64>::zeros(&[2, 2], &[Activation::Linear]);
        let mut state = AdamState::new(&net);
        assert!(state.step(&mut net, &Gradients::zeros_like(&other)).is_err());
    }
}
