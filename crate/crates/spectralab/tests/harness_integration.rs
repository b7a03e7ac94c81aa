//! End-to-end harness contracts: determinism, the replay oracle, sweep
//! bookkeeping, and persistence round-trips.

use spectralab::data::sample_latent;
use spectralab::diagnostics::{
    average_jacobian_spectrum, classifier_score, frechet_distance, mean_log_condition,
    mode_report,
};
use spectralab::harness::{
    build_context, checkpoint, read_run_dir, run_experiment, run_experiment_with_context,
    sweep, RunConfig, SeedSpec, SweepOptions,
};
use spectralab::linalg::covariance_stats;
use spectralab::models::{feature_activations, gan_train_step, GanTrainState};
use spectralab::rng::Rng;
use std::path::PathBuf;

fn temp_root(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("spectralab-it-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// Small config that still exercises the full pipeline.
fn smoke_config(out: PathBuf, steps: u64) -> RunConfig {
    let mut cfg = RunConfig::ring_baseline(SeedSpec::from_base(42), out);
    cfg.dataset = spectralab::harness::DatasetSpec::Ring {
        modes: 8,
        samples: 2_000,
        radius: 2.0,
        sigma: 0.02,
    };
    cfg.steps = steps;
    cfg.diagnostic_cadence = 5;
    cfg.probe_size = 8;
    cfg.classifier_epochs = 2;
    cfg.score_samples = 400;
    cfg.mode_samples = 360;
    cfg
}

#[test]
fn zero_step_run_has_exactly_the_initial_record() {
    let root = temp_root("zero-step");
    let cfg = smoke_config(root.join("run"), 0);
    let log = run_experiment(&cfg).unwrap();
    assert_eq!(log.records.len(), 1);
    assert_eq!(log.records[0].step, 0);
    assert_eq!(log.records[0].l_d, 0.0);
    assert!(!log.aborted);
    std::fs::remove_dir_all(&root).ok();
}

#[test]
fn identical_seeds_give_byte_identical_artifacts() {
    let root = temp_root("determinism");
    let cfg_a = smoke_config(root.join("a"), 15);
    let mut cfg_b = smoke_config(root.join("b"), 15);
    run_experiment(&cfg_a).unwrap();
    run_experiment(&cfg_b).unwrap();

    for file in ["runlog.csv", "spectra.csv", "generator.ckpt", "classifier.ckpt"] {
        let a = std::fs::read(root.join("a").join(file)).unwrap();
        let b = std::fs::read(root.join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }

    // A different latent seed must change the log.
    cfg_b.seeds.latent ^= 0xdead_beef;
    cfg_b.out_dir = root.join("c");
    run_experiment(&cfg_b).unwrap();
    let a = std::fs::read(root.join("a").join("runlog.csv")).unwrap();
    let c = std::fs::read(root.join("c").join("runlog.csv")).unwrap();
    assert_ne!(a, c);
    std::fs::remove_dir_all(&root).ok();
}

#[test]
fn runlog_matches_module_level_replay() {
    // Replay the harness loop through the models/diagnostics modules with
    // the same stream discipline and compare every CSV field.
    let root = temp_root("replay");
    let cfg = smoke_config(root.join("run"), 12);
    let ctx = build_context(&cfg).unwrap();
    let log = run_experiment_with_context(&cfg, &ctx).unwrap();

    let n_x = ctx.dataset.dim();
    let (generator, discriminator) =
        spectralab::harness::run::build_networks(&cfg, ctx.dataset.kind, n_x);
    let probe = sample_latent::<f64>(
        cfg.probe_size,
        cfg.architecture.latent_dim,
        &mut Rng::seeded(cfg.seeds.latent, "probe"),
        "replay",
    )
    .unwrap();
    let mut state = GanTrainState::new(
        generator,
        discriminator,
        cfg.clamp,
        cfg.clamp_norm_mode,
        probe,
        cfg.batch_size,
    );
    state.gen_opt.learning_rate = cfg.learning_rate;
    state.disc_opt.learning_rate = cfg.learning_rate;
    let mut latent = Rng::seeded(cfg.seeds.latent, "train");
    let mut clamp = Rng::seeded(cfg.seeds.clamp_noise, "clamp");
    let mut eval = Rng::seeded(cfg.seeds.latent, "eval");
    let mut shuffle = Rng::seeded(cfg.seeds.data, "shuffle");

    let mut order: Vec<usize> = (0..ctx.dataset.len()).collect();
    let mut pos = usize::MAX;
    let mut replay_records = Vec::new();
    let mut last = None;

    let diagnose = |state: &GanTrainState<f64>,
                        eval: &mut Rng,
                        last: &Option<spectralab::models::StepMetrics<f64>>| {
        let condition = mean_log_condition(&state.generator, &state.probe_batch).unwrap();
        let z = sample_latent::<f64>(cfg.score_samples, cfg.architecture.latent_dim, eval, "score").unwrap();
        let samples = state.generator.forward(&z.z).unwrap();
        let score = classifier_score(&samples, &ctx.classifier).unwrap();
        let feats = feature_activations(&ctx.classifier, &samples).unwrap();
        let fid =
            frechet_distance(&ctx.real_stats, &covariance_stats(&feats).unwrap()).unwrap();
        let mode_z = sample_latent::<f64>(cfg.mode_samples, cfg.architecture.latent_dim, eval, "modes").unwrap();
        let modes =
            mode_report(&state.generator.forward(&mode_z.z).unwrap(), &ctx.classifier).unwrap();
        let spectrum = average_jacobian_spectrum(&state.generator, &state.probe_batch).unwrap();
        (
            condition.mean_log_condition,
            score,
            fid,
            modes,
            spectrum.eigenvalues.clone(),
            last.map(|m| (m.l_d, m.l_g)).unwrap_or((0.0, 0.0)),
        )
    };

    replay_records.push(diagnose(&state, &mut eval, &last));
    for step in 1..=cfg.steps {
        if pos == usize::MAX || pos + cfg.batch_size > order.len() {
            shuffle.shuffle(&mut order);
            pos = 0;
        }
        let batch = ctx.dataset.gather(&order[pos..pos + cfg.batch_size]);
        pos += cfg.batch_size;
        let metrics = gan_train_step(&mut state, &batch, &mut latent, &mut clamp).unwrap();
        last = Some(metrics);
        if step % cfg.diagnostic_cadence == 0 || step == cfg.steps {
            replay_records.push(diagnose(&state, &mut eval, &last));
        }
    }

    assert_eq!(log.records.len(), replay_records.len());
    for (got, want) in log.records.iter().zip(&replay_records) {
        assert_eq!(got.mean_log_cond, want.0);
        assert_eq!(got.classifier_score, want.1);
        assert_eq!(got.frechet_distance, want.2);
        assert_eq!(got.least_class, want.3.least_sampled_class);
        assert_eq!(got.least_count, want.3.least_count);
        assert_eq!((got.l_d, got.l_g), want.5);
    }
    let (_, last_spectrum) = log.spectra.last().unwrap();
    assert_eq!(last_spectrum, &replay_records.last().unwrap().4);
    std::fs::remove_dir_all(&root).ok();
}

#[test]
fn persisted_csv_parses_back_to_the_same_log() {
    let root = temp_root("reread");
    let cfg = smoke_config(root.join("run"), 10);
    let log = run_experiment(&cfg).unwrap();
    let reread = read_run_dir(&cfg.out_dir).unwrap();
    assert_eq!(log.records.len(), reread.records.len());
    for (a, b) in log.records.iter().zip(&reread.records) {
        assert_eq!(a, b, "CSV round-trip changed a record");
    }
    assert_eq!(log.spectra, reread.spectra);
    assert!(!reread.aborted);
    std::fs::remove_dir_all(&root).ok();
}

#[test]
fn loaded_checkpoint_reproduces_forward_pass_bit_exactly() {
    let root = temp_root("ckpt-forward");
    let cfg = smoke_config(root.join("run"), 8);
    run_experiment(&cfg).unwrap();
    let generator = checkpoint::load_checkpoint(&cfg.out_dir.join("generator.ckpt")).unwrap();
    let probe = sample_latent::<f64>(32, 2, &mut Rng::seeded(77, "ckpt"), "t").unwrap();
    let out_a = generator.forward(&probe.z).unwrap();

    let reloaded = checkpoint::load_checkpoint(&cfg.out_dir.join("generator.ckpt")).unwrap();
    let out_b = reloaded.forward(&probe.z).unwrap();
    assert_eq!(out_a, out_b);
    std::fs::remove_dir_all(&root).ok();
}

#[test]
fn single_run_sweep_summary_matches_run_terminal() {
    let root = temp_root("sweep-one");
    let cfg = smoke_config(root.join("sweep"), 6);
    let summary = sweep(&cfg, &SweepOptions::new(1)).unwrap();
    assert_eq!(summary.outcomes.len(), 1);
    assert_eq!(summary.completed_runs, 1);
    let terminal = summary.outcomes[0].terminal.as_ref().unwrap();
    assert_eq!(summary.terminal_frechet.mean, terminal.frechet_distance);
    assert_eq!(summary.terminal_frechet.variance, 0.0);
    assert!(root.join("sweep/run-000/runlog.csv").is_file());
    assert!(root.join("sweep/sweep_summary.json").is_file());
    std::fs::remove_dir_all(&root).ok();
}

#[test]
fn fixed_seed_sweep_flags_duplicates_and_has_zero_variance() {
    let root = temp_root("sweep-dup");
    let cfg = smoke_config(root.join("sweep"), 6);
    let opts = SweepOptions { n_runs: 2, vary_seeds: false, parallel: 1 };
    let summary = sweep(&cfg, &opts).unwrap();
    assert!(summary.duplicate_seeds);
    assert_eq!(summary.terminal_frechet.variance, 0.0);
    assert_eq!(summary.terminal_score.variance, 0.0);
    std::fs::remove_dir_all(&root).ok();
}

#[test]
fn varied_seed_sweep_runs_differ() {
    let root = temp_root("sweep-vary");
    let cfg = smoke_config(root.join("sweep"), 6);
    let opts = SweepOptions { n_runs: 2, vary_seeds: true, parallel: 2 };
    let summary = sweep(&cfg, &opts).unwrap();
    assert!(!summary.duplicate_seeds);
    let a = std::fs::read(root.join("sweep/run-000/runlog.csv")).unwrap();
    let b = std::fs::read(root.join("sweep/run-001/runlog.csv")).unwrap();
    assert_ne!(a, b);
    std::fs::remove_dir_all(&root).ok();
}

#[test]
fn sweep_execution_order_does_not_change_artifacts() {
    // Two-worker and one-worker sweeps must leave identical per-run bytes.
    let root = temp_root("sweep-order");
    let cfg_seq = smoke_config(root.join("seq"), 6);
    let cfg_par = smoke_config(root.join("par"), 6);
    sweep(&cfg_seq, &SweepOptions { n_runs: 3, vary_seeds: true, parallel: 1 }).unwrap();
    sweep(&cfg_par, &SweepOptions { n_runs: 3, vary_seeds: true, parallel: 3 }).unwrap();
    for i in 0..3 {
        let a = std::fs::read(root.join(format!("seq/run-{i:03}/runlog.csv"))).unwrap();
        let b = std::fs::read(root.join(format!("par/run-{i:03}/runlog.csv"))).unwrap();
        assert_eq!(a, b, "run {i} differs across execution orders");
    }
    std::fs::remove_dir_all(&root).ok();
}
