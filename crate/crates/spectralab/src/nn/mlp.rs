//! Fully connected networks: forward evaluation, reverse-mode parameter
//! gradients, and forward-mode Jacobian-vector products.

use super::{Activation, NnError};
use crate::linalg::Matrix;
use crate::rng::Rng;
use crate::scalar::{c, Scalar};

/// Weight initialization scale (DCGAN convention: N(0, 0.02^2)).
pub const DEFAULT_INIT_STD: f64 = 0.02;

/// A fully connected network.
///
/// Layer `k` maps width `layer_dims[k]` to `layer_dims[k + 1]` through
/// `act_k(W_k x + b_k)` with `W_k` stored row-major as `out x in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp<T: Scalar> {
    layer_dims: Vec<usize>,
    weights: Vec<Matrix<T>>,
    biases: Vec<Vec<T>>,
    activations: Vec<Activation>,
}

/// Per-layer parameter gradients, shaped like the network itself.
#[derive(Debug, Clone)]
pub struct Gradients<T: Scalar> {
    pub weights: Vec<Matrix<T>>,
    pub biases: Vec<Vec<T>>,
}

/// Post-activation outputs of every layer for one batch.
///
/// `layers[0]` is the input batch, `layers[k + 1]` the output of layer `k`.
#[derive(Debug, Clone)]
pub struct ForwardTrace<T: Scalar> {
    layers: Vec<Matrix<T>>,
}

impl<T: Scalar> ForwardTrace<T> {
    pub fn output(&self) -> &Matrix<T> {
        self.layers.last().expect("trace has at least the input")
    }

    pub fn input(&self) -> &Matrix<T> {
        &self.layers[0]
    }
}

/// Reverse-mode result: parameter gradients plus the loss gradient with
/// respect to the network input (needed to chain generators through
/// discriminators).
#[derive(Debug, Clone)]
pub struct BackwardResult<T: Scalar> {
    pub gradients: Gradients<T>,
    pub input_gradient: Matrix<T>,
}

impl<T: Scalar> Mlp<T> {
    /// Zero-initialized network. Panics on inconsistent architecture specs;
    /// those are construction-site bugs, not runtime conditions.
    pub fn zeros(layer_dims: &[usize], activations: &[Activation]) -> Self {
        assert!(layer_dims.len() >= 2, "need at least input and output widths");
        assert!(layer_dims.iter().all(|&d| d > 0), "zero-width layer");
        assert_eq!(
            activations.len(),
            layer_dims.len() - 1,
            "one activation per layer required"
        );
        let weights = (0..layer_dims.len() - 1)
            .map(|k| Matrix::zeros(layer_dims[k + 1], layer_dims[k]))
            .collect();
        let biases = (0..layer_dims.len() - 1)
            .map(|k| vec![T::zero(); layer_dims[k + 1]])
            .collect();
        Mlp {
            layer_dims: layer_dims.to_vec(),
            weights,
            biases,
            activations: activations.to_vec(),
        }
    }

    /// Gaussian-initialized network: weights N(0, std^2), biases zero.
    pub fn random_init(
        layer_dims: &[usize],
        activations: &[Activation],
        std: f64,
        rng: &mut Rng,
    ) -> Self {
        let mut net = Mlp::zeros(layer_dims, activations);
        for w in &mut net.weights {
            for x in w.data_mut() {
                *x = c::<T>(rng.next_normal() * std);
            }
        }
        net
    }

    /// Reassemble a network from checkpointed parts.
    pub fn from_parts(
        layer_dims: Vec<usize>,
        activations: Vec<Activation>,
        weights: Vec<Matrix<T>>,
        biases: Vec<Vec<T>>,
    ) -> Result<Self, NnError> {
        let mut net = Mlp::zeros(&layer_dims, &activations);
        if weights.len() != net.weights.len() || biases.len() != net.biases.len() {
            return Err(NnError::DimensionMismatch {
                what: "layer count",
                expected: net.weights.len(),
                got: weights.len(),
            });
        }
        for (k, w) in weights.iter().enumerate() {
            if w.rows() != layer_dims[k + 1] || w.cols() != layer_dims[k] {
                return Err(NnError::DimensionMismatch {
                    what: "weight shape",
                    expected: layer_dims[k + 1] * layer_dims[k],
                    got: w.rows() * w.cols(),
                });
            }
            if biases[k].len() != layer_dims[k + 1] {
                return Err(NnError::DimensionMismatch {
                    what: "bias length",
                    expected: layer_dims[k + 1],
                    got: biases[k].len(),
                });
            }
        }
        net.weights = weights;
        net.biases = biases;
        Ok(net)
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    pub fn activations(&self) -> &[Activation] {
        &self.activations
    }

    pub fn num_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_dims.last().unwrap()
    }

    pub fn weights(&self) -> &[Matrix<T>] {
        &self.weights
    }

    pub fn biases(&self) -> &[Vec<T>] {
        &self.biases
    }

    pub fn weights_mut(&mut self) -> &mut [Matrix<T>] {
        &mut self.weights
    }

    pub fn biases_mut(&mut self) -> &mut [Vec<T>] {
        &mut self.biases
    }

    /// Total parameter count.
    pub fn num_params(&self) -> usize {
        self.weights.iter().map(|w| w.rows() * w.cols()).sum::<usize>()
            + self.biases.iter().map(|b| b.len()).sum::<usize>()
    }

    /// Replace the final activation, e.g. to turn a logits head into a
    /// probability head after training.
    pub fn with_output_activation(mut self, act: Activation) -> Self {
        *self.activations.last_mut().unwrap() = act;
        self
    }

    fn check_input_width(&self, got: usize) -> Result<(), NnError> {
        if got != self.input_dim() {
            return Err(NnError::DimensionMismatch {
                what: "input width",
                expected: self.input_dim(),
                got,
            });
        }
        Ok(())
    }

    /// Forward pass over a batch; rows are independent samples.
    pub fn forward(&self, input: &Matrix<T>) -> Result<Matrix<T>, NnError> {
        Ok(self.forward_trace(input)?.layers.pop().unwrap())
    }

    /// Forward pass on a single vector.
    pub fn forward_vec(&self, input: &[T]) -> Result<Vec<T>, NnError> {
        self.check_input_width(input.len())?;
        let mut x = input.to_vec();
        for (k, w) in self.weights.iter().enumerate() {
            let mut y = w.mul_vec(&x);
            for (yi, b) in y.iter_mut().zip(&self.biases[k]) {
                *yi = self.activations[k].apply(*yi + *b);
            }
            x = y;
        }
        Ok(x)
    }

    /// Forward through the first `layers` layers only; `layers` equal to
    /// `num_layers() - 1` yields the last hidden activations (the feature
    /// space used for Frechet distances).
    pub fn forward_prefix(&self, input: &Matrix<T>, layers: usize) -> Result<Matrix<T>, NnError> {
        assert!(layers <= self.num_layers(), "prefix longer than the network");
        self.check_input_width(input.cols())?;
        let mut x = input.clone();
        for k in 0..layers {
            let mut out = x.matmul_transpose_b(&self.weights[k]);
            for i in 0..out.rows() {
                for (o, b) in out.row_mut(i).iter_mut().zip(&self.biases[k]) {
                    *o = self.activations[k].apply(*o + *b);
                }
            }
            x = out;
        }
        Ok(x)
    }

    /// Forward pass retaining every layer output for a later backward pass.
    pub fn forward_trace(&self, input: &Matrix<T>) -> Result<ForwardTrace<T>, NnError> {
        self.check_input_width(input.cols())?;
        let mut layers = Vec::with_capacity(self.num_layers() + 1);
        layers.push(input.clone());
        for (k, w) in self.weights.iter().enumerate() {
            let prev = layers.last().unwrap();
            // X W^T + b, activated row-wise.
            let mut out = prev.matmul_transpose_b(w);
            for i in 0..out.rows() {
                for (o, b) in out.row_mut(i).iter_mut().zip(&self.biases[k]) {
                    *o = self.activations[k].apply(*o + *b);
                }
            }
            layers.push(out);
        }
        Ok(ForwardTrace { layers })
    }

    /// Reverse-mode pass from `d loss / d output` back to parameter and
    /// input gradients. `trace` must come from `forward_trace` on this
    /// network with unchanged parameters.
    pub fn backward(
        &self,
        trace: &ForwardTrace<T>,
        upstream: &Matrix<T>,
    ) -> Result<BackwardResult<T>, NnError> {
        let out = trace.output();
        if upstream.rows() != out.rows() || upstream.cols() != out.cols() {
            return Err(NnError::DimensionMismatch {
                what: "upstream gradient shape",
                expected: out.rows() * out.cols(),
                got: upstream.rows() * upstream.cols(),
            });
        }
        let mut grads = Gradients::zeros_like(self);
        let mut delta = upstream.clone();
        for k in (0..self.num_layers()).rev() {
            let output_k = &trace.layers[k + 1];
            let input_k = &trace.layers[k];
            // delta <- upstream (.) act'(output)
            for i in 0..delta.rows() {
                for (d, &a) in delta.row_mut(i).iter_mut().zip(output_k.row(i)) {
                    *d *= self.activations[k].derivative_from_output(a);
                }
            }
            grads.weights[k] = delta.matmul_transpose_a(input_k);
            for i in 0..delta.rows() {
                for (b, &d) in grads.biases[k].iter_mut().zip(delta.row(i)) {
                    *b += d;
                }
            }
            delta = delta.matmul(&self.weights[k]);
        }
        Ok(BackwardResult { gradients: grads, input_gradient: delta })
    }

    /// Parameter gradients for a batch and an upstream loss gradient.
    pub fn param_gradients(
        &self,
        input: &Matrix<T>,
        upstream: &Matrix<T>,
    ) -> Result<Gradients<T>, NnError> {
        let trace = self.forward_trace(input)?;
        Ok(self.backward(&trace, upstream)?.gradients)
    }

    /// Forward-mode Jacobian-vector product `J_z v` at a point `z`.
    pub fn jvp(&self, z: &[T], v: &[T]) -> Result<Vec<T>, NnError> {
        self.check_input_width(z.len())?;
        if v.len() != z.len() {
            return Err(NnError::DimensionMismatch {
                what: "tangent width",
                expected: z.len(),
                got: v.len(),
            });
        }
        let mut value = z.to_vec();
        let mut tangent = v.to_vec();
        for (k, w) in self.weights.iter().enumerate() {
            let mut pre = w.mul_vec(&value);
            for (p, b) in pre.iter_mut().zip(&self.biases[k]) {
                *p += *b;
            }
            let new_tangent = w.mul_vec(&tangent);
            value = pre.iter().map(|&p| self.activations[k].apply(p)).collect();
            tangent = value
                .iter()
                .zip(new_tangent)
                .map(|(&a, t)| self.activations[k].derivative_from_output(a) * t)
                .collect();
        }
        Ok(tangent)
    }

    /// Exact Jacobian at `z`, one forward-mode pass per latent coordinate.
    ///
    /// All latent tangents propagate together as the columns of one matrix,
    /// which reproduces `jvp(z, e_j)` column by column; the latent side is
    /// narrow, so column-wise assembly is the cheap direction.
    pub fn jacobian(&self, z: &[T]) -> Result<Matrix<T>, NnError> {
        self.check_input_width(z.len())?;
        let n_z = z.len();
        let mut value = z.to_vec();
        // Tangent matrix: rows follow the current layer width, columns are
        // the n_z propagated directions; starts as the identity.
        let mut tangent: Matrix<T> = Matrix::identity(n_z);
        for (k, w) in self.weights.iter().enumerate() {
            let mut pre = w.mul_vec(&value);
            for (p, b) in pre.iter_mut().zip(&self.biases[k]) {
                *p += *b;
            }
            let mut new_tangent = w.matmul(&tangent);
            value = pre.iter().map(|&p| self.activations[k].apply(p)).collect();
            for (i, &a) in value.iter().enumerate() {
                let d = self.activations[k].derivative_from_output(a);
                for t in new_tangent.row_mut(i) {
                    *t *= d;
                }
            }
            tangent = new_tangent;
        }
        Ok(tangent)
    }

    pub fn all_finite(&self) -> bool {
        self.weights.iter().all(|w| w.all_finite())
            && self.biases.iter().all(|b| b.iter().all(|x| x.is_finite()))
    }
}

/// Row-wise softmax with the usual max-shift for stability.
pub fn softmax_rows<T: Scalar>(logits: &Matrix<T>) -> Matrix<T> {
    let mut out = logits.clone();
    for i in 0..out.rows() {
        let row = out.row_mut(i);
        let max = row.iter().copied().fold(T::neg_infinity(), T::max);
        let mut sum = T::zero();
        for x in row.iter_mut() {
            *x = (*x - max).exp();
            sum += *x;
        }
        for x in row.iter_mut() {
            *x /= sum;
        }
    }
    out
}

impl<T: Scalar> Gradients<T> {
    pub fn zeros_like(net: &Mlp<T>) -> Self {
        Gradients {
            weights: net.weights.iter().map(|w| Matrix::zeros(w.rows(), w.cols())).collect(),
            biases: net.biases.iter().map(|b| vec![T::zero(); b.len()]).collect(),
        }
    }

    /// Accumulate `other` into `self`.
    pub fn add_assign(&mut self, other: &Gradients<T>) {
        assert_eq!(self.weights.len(), other.weights.len(), "gradient layer count");
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()), "gradient shape");
            for (x, y) in a.data_mut().iter_mut().zip(b.data()) {
                *x += *y;
            }
        }
        for (a, b) in self.biases.iter_mut().zip(&other.biases) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += *y;
            }
        }
    }

    pub fn all_finite(&self) -> bool {
        self.weights.iter().all(|w| w.all_finite())
            && self.biases.iter().all(|b| b.iter().all(|x| x.is_finite()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Activation::*;

    type M = Matrix<f64>;

    #[test]
    fn linear_layer_is_matrix_product() {
        let mut net = Mlp::<f64>::zeros(&[2, 2], &[Linear]);
        net.weights_mut()[0] = M::from_rows(&[vec![3.0, 1.0], vec![0.0, -2.0]]);
        let out = net.forward_vec(&[1.0, 2.0]).unwrap();
        assert_eq!(out, vec![5.0, -4.0]);
    }

    #[test]
    fn zero_weight_tanh_outputs_zero() {
        let net = Mlp::<f64>::zeros(&[3, 4, 2], &[Tanh, Tanh]);
        let out = net.forward_vec(&[0.3, -0.7, 1.1]).unwrap();
        assert_eq!(out, vec![0.0, 0.0]);
    }

    #[test]
    fn batch_rows_match_vector_forward() {
        let mut rng = Rng::seeded(21, "mlp-batch");
        let net = Mlp::<f64>::random_init(&[3, 5, 2], &[Tanh, Linear], 0.5, &mut rng);
        let batch = M::from_fn(4, 3, |_, _| rng.next_normal());
        let out = net.forward(&batch).unwrap();
        for i in 0..4 {
            let single = net.forward_vec(batch.row(i)).unwrap();
            for (a, b) in out.row(i).iter().zip(&single) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn forward_matches_reference_evaluation() {
        // Straight-line scalar reference for a fixed seeded 2-layer net.
        let mut rng = Rng::seeded(77, "mlp-golden");
        let net = Mlp::<f64>::random_init(&[2, 3, 2], &[Tanh, Linear], 0.7, &mut rng);
        let z = [0.4, -1.2];
        let got = net.forward_vec(&z).unwrap();

        let w0 = &net.weights()[0];
        let w1 = &net.weights()[1];
        let mut hidden = [0.0f64; 3];
        for i in 0..3 {
            let mut acc = 0.0;
            for j in 0..2 {
                acc += w0[(i, j)] * z[j];
            }
            hidden[i] = acc.tanh();
        }
        for i in 0..2 {
            let mut acc = 0.0;
            for (j, h) in hidden.iter().enumerate() {
                acc += w1[(i, j)] * h;
            }
            assert!((got[i] - acc).abs() < 1e-15);
        }
    }

    #[test]
    fn width_mismatch_is_an_error() {
        let net = Mlp::<f64>::zeros(&[3, 2], &[Linear]);
        assert!(matches!(
            net.forward_vec(&[1.0, 2.0]),
            Err(NnError::DimensionMismatch { .. })
        ));
        let bad = M::zeros(2, 2);
        assert!(net.forward(&bad).is_err());
        assert!(net.jvp(&[1.0, 2.0, 3.0], &[1.0]).is_err());
    }

    #[test]
    fn sum_loss_weight_gradient_is_input_sum() {
        // Linear layer, loss = sum of outputs: dL/dW = ones^T X, i.e. every
        // weight row gradient equals the column sums of the input batch.
        let net = Mlp::<f64>::zeros(&[2, 3], &[Linear]);
        let input = M::from_rows(&[vec![1.0, 2.0], vec![10.0, 20.0]]);
        let upstream = M::from_fn(2, 3, |_, _| 1.0);
        let grads = net.param_gradients(&input, &upstream).unwrap();
        for i in 0..3 {
            assert_eq!(grads.weights[0][(i, 0)], 11.0);
            assert_eq!(grads.weights[0][(i, 1)], 22.0);
            assert_eq!(grads.biases[0][i], 2.0);
        }
    }

    #[test]
    fn zero_upstream_gives_zero_gradients() {
        let mut rng = Rng::seeded(4, "mlp-zero");
        let net = Mlp::<f64>::random_init(&[2, 4, 2], &[Tanh, Linear], 0.5, &mut rng);
        let input = M::from_fn(3, 2, |_, _| rng.next_normal());
        let grads = net.param_gradients(&input, &M::zeros(3, 2)).unwrap();
        for w in &grads.weights {
            assert_eq!(w.frobenius_norm(), 0.0);
        }
    }

    #[test]
    fn jvp_of_linear_net_is_matrix_product() {
        let mut net = Mlp::<f64>::zeros(&[2, 2], &[Linear]);
        net.weights_mut()[0] = M::from_rows(&[vec![3.0, 0.0], vec![0.0, 0.5]]);
        let out = net.jvp(&[7.0, -2.0], &[1.0, 2.0]).unwrap();
        assert_eq!(out, vec![3.0, 1.0]);

        let zero = net.jvp(&[7.0, -2.0], &[0.0, 0.0]).unwrap();
        assert_eq!(zero, vec![0.0, 0.0]);
    }

    #[test]
    fn jacobian_of_linear_net_is_weight_matrix() {
        let mut net = Mlp::<f64>::zeros(&[2, 3], &[Linear]);
        net.weights_mut()[0] = M::from_rows(&[
            vec![1.0, 2.0],
            vec![-0.5, 0.0],
            vec![3.0, 3.0],
        ]);
        let j = net.jacobian(&[0.1, 0.9]).unwrap();
        assert_eq!(&j, &net.weights()[0]);
    }

    #[test]
    fn jacobian_columns_match_jvp_exactly() {
        let mut rng = Rng::seeded(8, "mlp-jvp");
        let net =
            Mlp::<f64>::random_init(&[3, 8, 5], &[Tanh, Linear], 0.6, &mut rng);
        let z: Vec<f64> = (0..3).map(|_| rng.next_normal()).collect();
        let j = net.jacobian(&z).unwrap();
        for col in 0..3 {
            let mut e = vec![0.0; 3];
            e[col] = 1.0;
            let jv = net.jvp(&z, &e).unwrap();
            for row in 0..5 {
                assert_eq!(j[(row, col)], jv[row], "column {col} differs");
            }
        }
    }

    #[test]
    fn relu_jacobian_locally_constant() {
        let mut rng = Rng::seeded(15, "mlp-relu");
        let net = Mlp::<f64>::random_init(&[3, 6, 4], &[Relu, Linear], 0.8, &mut rng);
        let z: Vec<f64> = (0..3).map(|_| rng.next_normal()).collect();
        let j0 = net.jacobian(&z).unwrap();
        let dir: Vec<f64> = (0..3).map(|_| rng.next_normal()).collect();
        let z2: Vec<f64> = z.iter().zip(&dir).map(|(a, d)| a + 1e-7 * d).collect();
        let j1 = net.jacobian(&z2).unwrap();
        assert!(j0.sub(&j1).frobenius_norm() < 1e-12, "crossed a kink");
    }

    #[test]
    fn jvp_is_linear_in_tangent() {
        let mut rng = Rng::seeded(31, "mlp-lin");
        let net = Mlp::<f64>::random_init(&[4, 8, 3], &[Tanh, Tanh], 0.5, &mut rng);
        let z: Vec<f64> = (0..4).map(|_| rng.next_normal()).collect();
        let u: Vec<f64> = (0..4).map(|_| rng.next_normal()).collect();
        let v: Vec<f64> = (0..4).map(|_| rng.next_normal()).collect();
        let (a, b) = (0.7, -1.9);
        let combo: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
        let lhs = net.jvp(&z, &combo).unwrap();
        let ju = net.jvp(&z, &u).unwrap();
        let jv = net.jvp(&z, &v).unwrap();
        for i in 0..3 {
            assert!((lhs[i] - (a * ju[i] + b * jv[i])).abs() < 1e-10);
        }
    }

    #[test]
    fn seeded_init_is_deterministic() {
        let a = Mlp::<f64>::random_init(&[2, 4, 2], &[Tanh, Linear], 0.02, &mut Rng::seeded(5, "init"));
        let b = Mlp::<f64>::random_init(&[2, 4, 2], &[Tanh, Linear], 0.02, &mut Rng::seeded(5, "init"));
        assert_eq!(a, b);
    }
}
