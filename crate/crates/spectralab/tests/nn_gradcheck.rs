//! Finite-difference oracles for reverse-mode gradients and forward-mode
//! Jacobian products. The oracles here are straight-line central
//! differences, independent of the library's backward/jvp code paths.

use spectralab::nn::{Activation, Mlp};
use spectralab::rng::Rng;
use spectralab::Matrix64;

const FD_STEP: f64 = 1e-5;

/// Central-difference Jacobian, column by column.
fn fd_jacobian(net: &Mlp<f64>, z: &[f64]) -> Matrix64 {
    let n_z = z.len();
    let n_x = net.output_dim();
    let mut jac = Matrix64::zeros(n_x, n_z);
    for j in 0..n_z {
        let mut zp = z.to_vec();
        let mut zm = z.to_vec();
        zp[j] += FD_STEP;
        zm[j] -= FD_STEP;
        let fp = net.forward_vec(&zp).unwrap();
        let fm = net.forward_vec(&zm).unwrap();
        for i in 0..n_x {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * FD_STEP);
        }
    }
    jac
}

/// Scalar loss `sum(upstream .* forward(input))` evaluated from scratch,
/// used to central-difference every parameter.
fn loss_of(net: &Mlp<f64>, input: &Matrix64, upstream: &Matrix64) -> f64 {
    let out = net.forward(input).unwrap();
    out.data().iter().zip(upstream.data()).map(|(a, b)| a * b).sum()
}

#[test]
fn param_gradients_match_central_differences() {
    let mut rng = Rng::seeded(101, "gradcheck");
    // Every architecture family used in the repo: generator-like,
    // discriminator-like, classifier-like.
    let cases: Vec<(Vec<usize>, Vec<Activation>)> = vec![
        (vec![8, 64, 64, 2], vec![Activation::Tanh, Activation::Tanh, Activation::Linear]),
        (vec![2, 64, 64, 1], vec![Activation::LeakyRelu, Activation::LeakyRelu, Activation::Linear]),
        (vec![2, 64, 8], vec![Activation::Tanh, Activation::Linear]),
        (vec![8, 16, 4], vec![Activation::Tanh, Activation::Sigmoid]),
    ];
    for (dims, acts) in cases {
        let mut net = Mlp::<f64>::random_init(&dims, &acts, 0.3, &mut rng);
        let batch = Matrix64::from_fn(5, dims[0], |_, _| rng.next_normal());
        let upstream = Matrix64::from_fn(5, *dims.last().unwrap(), |_, _| rng.next_normal());
        let analytic = net.param_gradients(&batch, &upstream).unwrap();

        for layer in 0..net.num_layers() {
            let (rows, cols) = (analytic.weights[layer].rows(), analytic.weights[layer].cols());
            for r in 0..rows {
                for c in 0..cols {
                    let orig = net.weights()[layer][(r, c)];
                    net.weights_mut()[layer][(r, c)] = orig + FD_STEP;
                    let lp = loss_of(&net, &batch, &upstream);
                    net.weights_mut()[layer][(r, c)] = orig - FD_STEP;
                    let lm = loss_of(&net, &batch, &upstream);
                    net.weights_mut()[layer][(r, c)] = orig;
                    let fd = (lp - lm) / (2.0 * FD_STEP);
                    let got = analytic.weights[layer][(r, c)];
                    let denom = fd.abs().max(1.0);
                    assert!(
                        (got - fd).abs() / denom < 1e-4,
                        "dims {dims:?} layer {layer} w[{r},{c}]: analytic {got} vs fd {fd}"
                    );
                }
            }
            for b in 0..analytic.biases[layer].len() {
                let orig = net.biases()[layer][b];
                net.biases_mut()[layer][b] = orig + FD_STEP;
                let lp = loss_of(&net, &batch, &upstream);
                net.biases_mut()[layer][b] = orig - FD_STEP;
                let lm = loss_of(&net, &batch, &upstream);
                net.biases_mut()[layer][b] = orig;
                let fd = (lp - lm) / (2.0 * FD_STEP);
                let got = analytic.biases[layer][b];
                assert!(
                    (got - fd).abs() / fd.abs().max(1.0) < 1e-4,
                    "dims {dims:?} layer {layer} b[{b}]: analytic {got} vs fd {fd}"
                );
            }
        }
    }
}

#[test]
fn jvp_matches_central_difference_directional_derivative() {
    let mut rng = Rng::seeded(55, "jvp-fd");
    for _ in 0..5 {
        let net = Mlp::<f64>::random_init(
            &[4, 32, 32, 6],
            &[Activation::Tanh, Activation::Tanh, Activation::Linear],
            0.4,
            &mut rng,
        );
        let z: Vec<f64> = (0..4).map(|_| rng.next_normal()).collect();
        let v: Vec<f64> = (0..4).map(|_| rng.next_normal()).collect();
        let jv = net.jvp(&z, &v).unwrap();

        let zp: Vec<f64> = z.iter().zip(&v).map(|(a, b)| a + FD_STEP * b).collect();
        let zm: Vec<f64> = z.iter().zip(&v).map(|(a, b)| a - FD_STEP * b).collect();
        let fp = net.forward_vec(&zp).unwrap();
        let fm = net.forward_vec(&zm).unwrap();
        let scale = jv.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
        for i in 0..6 {
            let fd = (fp[i] - fm[i]) / (2.0 * FD_STEP);
            assert!(
                (jv[i] - fd).abs() / scale < 1e-5,
                "jvp[{i}] = {} vs fd {fd}",
                jv[i]
            );
        }
    }
}

#[test]
fn jacobian_matches_full_finite_difference() {
    let mut rng = Rng::seeded(70, "jac-fd");
    let net = Mlp::<f64>::random_init(
        &[8, 64, 64, 2],
        &[Activation::Tanh, Activation::Tanh, Activation::Linear],
        0.3,
        &mut rng,
    );
    let z: Vec<f64> = (0..8).map(|_| rng.next_normal()).collect();
    let analytic = net.jacobian(&z).unwrap();
    let fd = fd_jacobian(&net, &z);
    let rel = analytic.sub(&fd).frobenius_norm() / fd.frobenius_norm();
    assert!(rel < 1e-5, "relative Frobenius error {rel}");
}

#[test]
fn jacobian_times_vector_agrees_with_jvp() {
    let mut rng = Rng::seeded(90, "jac-jvp");
    let net = Mlp::<f64>::random_init(
        &[5, 20, 7],
        &[Activation::Tanh, Activation::Linear],
        0.5,
        &mut rng,
    );
    let z: Vec<f64> = (0..5).map(|_| rng.next_normal()).collect();
    let v: Vec<f64> = (0..5).map(|_| rng.next_normal()).collect();
    let j = net.jacobian(&z).unwrap();
    let jv_direct = j.mul_vec(&v);
    let jv = net.jvp(&z, &v).unwrap();
    for i in 0..7 {
        assert!((jv_direct[i] - jv[i]).abs() < 1e-10);
    }
}
