//! One training run: configuration in, incrementally persisted RunLog out.

use super::checkpoint::save_checkpoint;
use super::config::RunConfig;
use super::runlog::{DiagRecord, RunLog, RunLogWriter, RunSummary};
use super::HarnessError;
use crate::data::{sample_latent, DataKind, Dataset, LatentBatch};
use crate::diagnostics::{
    average_jacobian_spectrum, classifier_score, frechet_distance, mean_log_condition,
    mode_report, DiagnosticsError,
};
use crate::linalg::{covariance_stats, GaussianStats, LinalgError};
use crate::models::{
    feature_activations, gan_train_step, train_classifier, GanTrainState, ModelError,
    StepMetrics,
};
use crate::nn::{Activation, Mlp, DEFAULT_INIT_STD};
use crate::rng::Rng;

/// The shared measurement apparatus: dataset, scoring classifier, and the
/// feature statistics of real samples. A sweep builds this once so every
/// run is scored by the same instruments.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub dataset: Dataset<f64>,
    pub classifier: Mlp<f64>,
    pub classifier_accuracy: f64,
    pub real_stats: GaussianStats<f64>,
}

pub fn build_context(cfg: &RunConfig) -> Result<RunContext, HarnessError> {
    let dataset = cfg.dataset.build(&cfg.seeds)?;
    let mut cls_rng = Rng::seeded(cfg.seeds.data, "classifier");
    let trained = train_classifier(&dataset, cfg.classifier_epochs, &mut cls_rng)?;

    let mut eval_rng = Rng::seeded(cfg.seeds.data, "real-eval");
    let n = cfg.score_samples.min(dataset.len());
    let indices: Vec<usize> = (0..n).map(|_| eval_rng.next_index(dataset.len())).collect();
    let real_batch = dataset.gather(&indices);
    let features = feature_activations(&trained.classifier, &real_batch)?;
    let real_stats = covariance_stats(&features)?;

    Ok(RunContext {
        dataset,
        classifier: trained.classifier,
        classifier_accuracy: trained.held_out_accuracy,
        real_stats,
    })
}

/// Build the generator/discriminator pair for a config.
pub fn build_networks(cfg: &RunConfig, kind: DataKind, n_x: usize) -> (Mlp<f64>, Mlp<f64>) {
    let arch = &cfg.architecture;
    let mut g_dims = vec![arch.latent_dim];
    g_dims.extend_from_slice(&arch.generator_hidden);
    g_dims.push(n_x);
    let out_act = match kind {
        DataKind::Planar => Activation::Linear,
        DataKind::Image => Activation::Sigmoid,
    };
    let g_acts: Vec<Activation> = arch
        .generator_hidden
        .iter()
        .map(|_| Activation::Tanh)
        .chain([out_act])
        .collect();

    let mut d_dims = vec![n_x];
    d_dims.extend_from_slice(&arch.discriminator_hidden);
    d_dims.push(1);
    let d_acts: Vec<Activation> = arch
        .discriminator_hidden
        .iter()
        .map(|_| Activation::LeakyRelu)
        .chain([Activation::Linear])
        .collect();

    let generator = Mlp::random_init(
        &g_dims,
        &g_acts,
        DEFAULT_INIT_STD,
        &mut Rng::seeded(cfg.seeds.init, "generator"),
    );
    let discriminator = Mlp::random_init(
        &d_dims,
        &d_acts,
        DEFAULT_INIT_STD,
        &mut Rng::seeded(cfg.seeds.init, "discriminator"),
    );
    (generator, discriminator)
}

/// Deterministic minibatch cursor: full batches over reshuffled epochs.
struct BatchCursor {
    order: Vec<usize>,
    pos: usize,
    rng: Rng,
}

impl BatchCursor {
    fn new(n: usize, rng: Rng) -> Self {
        BatchCursor { order: (0..n).collect(), pos: usize::MAX, rng }
    }

    fn next_batch(&mut self, b: usize) -> &[usize] {
        if self.pos == usize::MAX || self.pos + b > self.order.len() {
            self.rng.shuffle(&mut self.order);
            self.pos = 0;
        }
        let batch = &self.order[self.pos..self.pos + b];
        self.pos += b;
        batch
    }
}

/// Evaluate one diagnostic record plus the average-Jacobian spectrum.
fn diagnose(
    state: &GanTrainState<f64>,
    ctx: &RunContext,
    cfg: &RunConfig,
    eval_rng: &mut Rng,
    last_metrics: &StepMetrics<f64>,
) -> Result<(DiagRecord, Vec<f64>), HarnessError> {
    let n_z = state.latent_dim();
    let condition = mean_log_condition(&state.generator, &state.probe_batch)?;

    let score_z: LatentBatch<f64> = sample_latent(cfg.score_samples, n_z, eval_rng, "score")?;
    let score_samples = state.generator.forward(&score_z.z)?;
    let score = classifier_score(&score_samples, &ctx.classifier)?;
    let fake_features = feature_activations(&ctx.classifier, &score_samples)?;
    let fake_stats = covariance_stats(&fake_features)?;
    let fid = frechet_distance(&ctx.real_stats, &fake_stats)?;

    let mode_z: LatentBatch<f64> = sample_latent(cfg.mode_samples, n_z, eval_rng, "modes")?;
    let mode_samples = state.generator.forward(&mode_z.z)?;
    let modes = mode_report(&mode_samples, &ctx.classifier)?;

    let spectrum = match average_jacobian_spectrum(&state.generator, &state.probe_batch) {
        Ok(report) => report.eigenvalues.clone(),
        // A zero averaged Jacobian has no positive spectrum; log it as zeros.
        Err(DiagnosticsError::Linalg(LinalgError::DegenerateSpectrum { .. })) => {
            vec![0.0; n_z]
        }
        Err(e) => return Err(e.into()),
    };

    let record = DiagRecord {
        step: state.step_count,
        l_d: last_metrics.l_d,
        l_g: last_metrics.l_g,
        clamp_penalty: last_metrics.clamp_penalty,
        q_mean: last_metrics.q_mean,
        q_max: last_metrics.q_max,
        mean_log_cond: condition.mean_log_condition,
        floored_points: condition.floored_points,
        classifier_score: score,
        frechet_distance: fid,
        least_class: modes.least_sampled_class,
        least_count: modes.least_count,
    };
    Ok((record, spectrum))
}

/// Run a configured experiment end to end, persisting into `cfg.out_dir`.
pub fn run_experiment(cfg: &RunConfig) -> Result<RunLog, HarnessError> {
    let ctx = build_context(cfg)?;
    run_experiment_with_context(cfg, &ctx)
}

pub fn run_experiment_with_context(
    cfg: &RunConfig,
    ctx: &RunContext,
) -> Result<RunLog, HarnessError> {
    cfg.validate()?;
    let dir = &cfg.out_dir;
    std::fs::create_dir_all(dir)
        .map_err(|e| HarnessError::Io { path: dir.clone(), source: e })?;
    let config_path = dir.join("config.json");
    let config_text = serde_json::to_string_pretty(cfg).expect("config serializes");
    std::fs::write(&config_path, config_text + "\n")
        .map_err(|e| HarnessError::Io { path: config_path, source: e })?;

    let n_x = ctx.dataset.dim();
    let (generator, discriminator) = build_networks(cfg, ctx.dataset.kind, n_x);
    let probe = sample_latent(
        cfg.probe_size,
        cfg.architecture.latent_dim,
        &mut Rng::seeded(cfg.seeds.latent, "probe"),
        &format!("probe:latent-seed={}", cfg.seeds.latent),
    )?;
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

    let mut latent_rng = Rng::seeded(cfg.seeds.latent, "train");
    let mut clamp_rng = Rng::seeded(cfg.seeds.clamp_noise, "clamp");
    let mut eval_rng = Rng::seeded(cfg.seeds.latent, "eval");
    let mut cursor = BatchCursor::new(ctx.dataset.len(), Rng::seeded(cfg.seeds.data, "shuffle"));

    let mut writer = RunLogWriter::create(dir)?;
    let mut log = RunLog {
        records: Vec::new(),
        spectra: Vec::new(),
        aborted: false,
        abort_reason: None,
    };
    let mut last_metrics = StepMetrics {
        l_d: 0.0,
        l_g: 0.0,
        clamp_penalty: 0.0,
        q_mean: 0.0,
        q_max: 0.0,
    };

    // Step-0 record: losses are zero placeholders (no step has run yet),
    // conditioning and scores measure the fresh networks.
    let (record, spectrum) = diagnose(&state, ctx, cfg, &mut eval_rng, &last_metrics)?;
    writer.append(&record, &spectrum)?;
    log.spectra.push((0, spectrum));
    log.records.push(record);

    for step in 1..=cfg.steps {
        let batch_idx = cursor.next_batch(cfg.batch_size).to_vec();
        let real = ctx.dataset.gather(&batch_idx);
        match gan_train_step(&mut state, &real, &mut latent_rng, &mut clamp_rng) {
            Ok(metrics) => last_metrics = metrics,
            Err(err @ ModelError::NonFiniteLoss { .. }) | Err(err @ ModelError::Nn(_)) => {
                log.aborted = true;
                log.abort_reason = Some(err.to_string());
                break;
            }
            Err(err) => return Err(err.into()),
        }
        if step % cfg.diagnostic_cadence == 0 || step == cfg.steps {
            let (record, spectrum) = diagnose(&state, ctx, cfg, &mut eval_rng, &last_metrics)?;
            writer.append(&record, &spectrum)?;
            log.spectra.push((step, spectrum));
            log.records.push(record);
        }
    }

    let summary = RunSummary {
        schema_version: super::config::CONFIG_SCHEMA_VERSION,
        aborted: log.aborted,
        abort_reason: log.abort_reason.clone(),
        steps_completed: state.step_count,
        diagnostic_cadence: cfg.diagnostic_cadence,
        classifier_accuracy: ctx.classifier_accuracy,
        generator_forward_rows: state.gen_forward_rows,
        terminal: log.terminal().cloned(),
        terminal_spectrum: log.terminal_spectrum().map(<[f64]>::to_vec).unwrap_or_default(),
    };
    let summary_path = dir.join("summary.json");
    let summary_text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    std::fs::write(&summary_path, summary_text + "\n")
        .map_err(|e| HarnessError::Io { path: summary_path, source: e })?;

    save_checkpoint(&state.generator, &dir.join("generator.ckpt"))?;
    save_checkpoint(&state.discriminator, &dir.join("discriminator.ckpt"))?;
    save_checkpoint(&ctx.classifier, &dir.join("classifier.ckpt"))?;
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::SeedSpec;
    use std::path::PathBuf;

    #[test]
    fn network_heads_follow_data_kind() {
        let cfg = RunConfig::ring_baseline(SeedSpec::from_base(1), PathBuf::from("unused"));
        let (g, d) = build_networks(&cfg, DataKind::Planar, 2);
        assert_eq!(g.layer_dims(), &[2, 64, 64, 2]);
        assert_eq!(*g.activations().last().unwrap(), Activation::Linear);
        assert_eq!(d.layer_dims(), &[2, 64, 64, 1]);
        assert_eq!(*d.activations().last().unwrap(), Activation::Linear);
        assert_eq!(d.activations()[0], Activation::LeakyRelu);

        // Image data gets a sigmoid generator head over [0, 1] pixels.
        let (g, _) = build_networks(&cfg, DataKind::Image, 196);
        assert_eq!(g.output_dim(), 196);
        assert_eq!(*g.activations().last().unwrap(), Activation::Sigmoid);
    }

    #[test]
    fn batch_cursor_walks_full_epochs() {
        let mut cursor = BatchCursor::new(10, crate::rng::Rng::seeded(1, "cursor"));
        let mut seen = Vec::new();
        for _ in 0..2 {
            seen.extend_from_slice(cursor.next_batch(5));
        }
        seen.sort_unstable();
        assert_eq!(seen, (0..10).collect::<Vec<_>>());
    }
}
