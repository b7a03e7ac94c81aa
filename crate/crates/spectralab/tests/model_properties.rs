//! Property tests for the training-side algebra.

use proptest::prelude::*;
use spectralab::data::sample_latent;
use spectralab::models::{jacobian_clamping_penalty, ClampConfig, ClampNormMode};
use spectralab::nn::{Activation, Mlp};
use spectralab::rng::Rng;
use spectralab::Mlp64;

fn isotropic_generator(n: usize, gain: f64) -> Mlp64 {
    let mut g = Mlp64::zeros(&[n, n], &[Activation::Linear]);
    for i in 0..n {
        g.weights_mut()[0][(i, i)] = gain;
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn penalty_dead_zone_iff_quotients_in_band(
        gain in 0.01f64..60.0,
        seed in 0u64..1000,
    ) {
        let g = isotropic_generator(3, gain);
        let cfg = ClampConfig::default().enabled();
        let z = sample_latent::<f64>(8, 3, &mut Rng::seeded(seed, "z"), "t").unwrap();
        let pen = jacobian_clamping_penalty(
            &g, &z, &cfg, ClampNormMode::PerExample, &mut Rng::seeded(seed, "d"),
        ).unwrap();
        let all_inside = pen
            .quotients
            .iter()
            .all(|&q| q >= cfg.lambda_min && q <= cfg.lambda_max);
        prop_assert_eq!(pen.penalty == 0.0, all_inside);
    }

    #[test]
    fn penalty_monotone_in_band_violation(
        base in 21.0f64..40.0,
        extra in 0.1f64..30.0,
        seed in 0u64..1000,
    ) {
        // Fixed perturbation draw; larger |Q - clamp(Q)| cannot pay less.
        let cfg = ClampConfig::default().enabled();
        let z = sample_latent::<f64>(8, 2, &mut Rng::seeded(seed, "z"), "t").unwrap();
        let eval = |gain: f64| {
            jacobian_clamping_penalty(
                &isotropic_generator(2, gain),
                &z,
                &cfg,
                ClampNormMode::PerExample,
                &mut Rng::seeded(seed, "d"),
            )
            .unwrap()
            .penalty
        };
        prop_assert!(eval(base + extra) > eval(base));
    }

    #[test]
    fn jvp_linearity(
        seed in 0u64..500,
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let mut rng = Rng::seeded(seed, "jvp-prop");
        let net = Mlp::<f64>::random_init(
            &[3, 10, 4],
            &[Activation::Tanh, Activation::Tanh],
            0.5,
            &mut rng,
        );
        let z: Vec<f64> = (0..3).map(|_| rng.next_normal()).collect();
        let u: Vec<f64> = (0..3).map(|_| rng.next_normal()).collect();
        let v: Vec<f64> = (0..3).map(|_| rng.next_normal()).collect();
        let combo: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
        let lhs = net.jvp(&z, &combo).unwrap();
        let ju = net.jvp(&z, &u).unwrap();
        let jv = net.jvp(&z, &v).unwrap();
        for i in 0..4 {
            prop_assert!((lhs[i] - (a * ju[i] + b * jv[i])).abs() < 1e-10);
        }
    }
}
