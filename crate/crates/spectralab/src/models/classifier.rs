//! The scoring classifier: a small softmax network trained on the labeled
//! dataset, standing in for a pretrained image classifier.

use super::ModelError;
use crate::data::Dataset;
use crate::linalg::Matrix;
use crate::nn::{softmax_rows, Activation, AdamState, Mlp, DEFAULT_INIT_STD};
use crate::rng::Rng;
use crate::scalar::Scalar;

/// Width of the hidden layer whose activations double as the Frechet
/// feature space.
pub const CLASSIFIER_HIDDEN_WIDTH: usize = 64;

const CLASSIFIER_LEARNING_RATE: f64 = 1e-3;
const CLASSIFIER_BATCH: usize = 64;
const HELD_OUT_FRACTION: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct ClassifierResult<T: Scalar> {
    pub classifier: Mlp<T>,
    pub held_out_accuracy: f64,
}

/// Train a `n_x -> 64 -> K` softmax classifier with cross-entropy and
/// report accuracy on a 10% held-out split.
pub fn train_classifier<T: Scalar>(
    dataset: &Dataset<T>,
    epochs: usize,
    rng: &mut Rng,
) -> Result<ClassifierResult<T>, ModelError> {
    let labels = dataset.labels.as_ref().ok_or(ModelError::UnlabeledDataset)?;
    let k = dataset.num_classes;
    if k < 2 {
        return Err(ModelError::InvalidParameter(format!(
            "classifier needs K >= 2 classes, got {k}"
        )));
    }
    if dataset.len() < 10 {
        return Err(ModelError::InvalidParameter(format!(
            "classifier needs at least 10 samples for a held-out split, got {}",
            dataset.len()
        )));
    }

    let mut indices: Vec<usize> = (0..dataset.len()).collect();
    rng.shuffle(&mut indices);
    let held = ((dataset.len() as f64 * HELD_OUT_FRACTION) as usize).max(1);
    let (train_idx, held_idx) = indices.split_at(dataset.len() - held);

    let dims = [dataset.dim(), CLASSIFIER_HIDDEN_WIDTH, k];
    let acts = [Activation::Tanh, Activation::Linear];
    let mut net = Mlp::<T>::random_init(&dims, &acts, DEFAULT_INIT_STD, rng);
    let mut opt = AdamState::new(&net).with_learning_rate(CLASSIFIER_LEARNING_RATE);

    let mut order = train_idx.to_vec();
    for _ in 0..epochs {
        rng.shuffle(&mut order);
        for chunk in order.chunks(CLASSIFIER_BATCH) {
            let batch = dataset.gather(chunk);
            let trace = net.forward_trace(&batch)?;
            let probs = softmax_rows(trace.output());
            // d CE / d logits = (softmax - onehot) / B
            let inv_b = T::one() / T::from_usize(chunk.len()).unwrap();
            let mut upstream = probs;
            for (r, &i) in chunk.iter().enumerate() {
                let row = upstream.row_mut(r);
                row[labels[i]] -= T::one();
                for x in row {
                    *x *= inv_b;
                }
            }
            let grads = net.backward(&trace, &upstream)?.gradients;
            opt.step(&mut net, &grads)?;
        }
    }

    let held_batch = dataset.gather(held_idx);
    let logits = net.forward(&held_batch)?;
    let mut correct = 0usize;
    for (r, &i) in held_idx.iter().enumerate() {
        if argmax(logits.row(r)) == labels[i] {
            correct += 1;
        }
    }
    let held_out_accuracy = correct as f64 / held_idx.len() as f64;
    Ok(ClassifierResult { classifier: net, held_out_accuracy })
}

/// Index of the row maximum; ties resolve to the lowest index.
pub fn argmax<T: Scalar>(row: &[T]) -> usize {
    let mut best = 0;
    for (i, &x) in row.iter().enumerate().skip(1) {
        if x > row[best] {
            best = i;
        }
    }
    best
}

/// Last-hidden-layer activations of the classifier for a sample batch.
pub fn feature_activations<T: Scalar>(
    classifier: &Mlp<T>,
    samples: &Matrix<T>,
) -> Result<Matrix<T>, ModelError> {
    Ok(classifier.forward_prefix(samples, classifier.num_layers() - 1)?)
}
