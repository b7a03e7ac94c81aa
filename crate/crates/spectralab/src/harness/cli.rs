//! Command-line interface.
//!
//! Exit codes: 0 on success, 2 for usage errors, 1 for runtime failures
//! (one-line diagnostic on stderr).

use super::checkpoint::{load_checkpoint, save_checkpoint};
use super::config::{MemorizeConfig, RunConfig, SeedSpec, VaeConfig};
use super::report::report;
use super::run::run_experiment;
use super::sweep::{sweep, SweepOptions};
use super::HarnessError;
use crate::data::sample_latent;
use crate::diagnostics::{average_jacobian_spectrum, classifier_score, mean_log_condition, mode_report};
use crate::models::{train_classifier, train_memorizer, train_vae};
use crate::rng::Rng;
use std::path::PathBuf;

const USAGE: &str = "spectralab - generator Jacobian conditioning laboratory

USAGE:
  spectralab train <config.json> [--out DIR] [--seed N]
  spectralab sweep <config.json> --runs N [--parallel K] [--out DIR] [--seed N] [--fixed-seeds]
  spectralab spectra <generator.ckpt> [--probe N] [--seed N] [--out FILE]
  spectralab score <generator.ckpt> --classifier <classifier.ckpt> [--samples N] [--seed N]
  spectralab memorize <config.json> [--out DIR] [--seed N]
  spectralab vae <config.json> [--out DIR] [--seed N]
  spectralab report <dir> [--out DIR]

COMMON FLAGS:
  --seed N   derive all stream seeds from one base value
  --out P    override the configured output directory (or report target)
";

/// Parsed flag set: positionals plus `--key value` / `--flag` pairs.
struct Args {
    positional: Vec<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    runs: Option<usize>,
    parallel: Option<usize>,
    probe: Option<usize>,
    samples: Option<usize>,
    classifier: Option<PathBuf>,
    fixed_seeds: bool,
}

fn parse_args(args: &[String]) -> Result<Args, String> {
    let mut out = Args {
        positional: Vec::new(),
        seed: None,
        out: None,
        runs: None,
        parallel: None,
        probe: None,
        samples: None,
        classifier: None,
        fixed_seeds: false,
    };
    let mut i = 0;
    while i < args.len() {
        let arg = &args[i];
        let mut take_value = |name: &str| -> Result<String, String> {
            i += 1;
            args.get(i).cloned().ok_or_else(|| format!("{name} needs a value"))
        };
        match arg.as_str() {
            "--seed" => out.seed = Some(parse_num(&take_value("--seed")?, "--seed")?),
            "--out" => out.out = Some(PathBuf::from(take_value("--out")?)),
            "--runs" => out.runs = Some(parse_num(&take_value("--runs")?, "--runs")? as usize),
            "--parallel" => {
                out.parallel = Some(parse_num(&take_value("--parallel")?, "--parallel")? as usize)
            }
            "--probe" => out.probe = Some(parse_num(&take_value("--probe")?, "--probe")? as usize),
            "--samples" => {
                out.samples = Some(parse_num(&take_value("--samples")?, "--samples")? as usize)
            }
            "--classifier" => out.classifier = Some(PathBuf::from(take_value("--classifier")?)),
            "--fixed-seeds" => out.fixed_seeds = true,
            other if other.starts_with("--") => return Err(format!("unknown flag {other}")),
            other => out.positional.push(other.to_string()),
        }
        i += 1;
    }
    Ok(out)
}

fn parse_num(text: &str, flag: &str) -> Result<u64, String> {
    text.parse::<u64>().map_err(|_| format!("{flag} expects an integer, got {text:?}"))
}

/// Entry point used by `main`; returns the process exit code.
pub fn run(raw_args: Vec<String>) -> i32 {
    let Some((command, rest)) = raw_args.split_first() else {
        eprint!("{USAGE}");
        return 2;
    };
    if command == "--help" || command == "-h" || command == "help" {
        print!("{USAGE}");
        return 0;
    }
    let args = match parse_args(rest) {
        Ok(args) => args,
        Err(msg) => {
            eprintln!("error: {msg}");
            eprint!("{USAGE}");
            return 2;
        }
    };
    let result = match command.as_str() {
        "train" => cmd_train(&args),
        "sweep" => cmd_sweep(&args),
        "spectra" => cmd_spectra(&args),
        "score" => cmd_score(&args),
        "memorize" => cmd_memorize(&args),
        "vae" => cmd_vae(&args),
        "report" => cmd_report(&args),
        other => {
            eprintln!("error: unknown subcommand {other:?}");
            eprint!("{USAGE}");
            return 2;
        }
    };
    match result {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprint!("{USAGE}");
            2
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

enum CliError {
    Usage(String),
    Runtime(HarnessError),
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        CliError::Runtime(e)
    }
}

fn one_positional(args: &Args, what: &str) -> Result<PathBuf, CliError> {
    match args.positional.as_slice() {
        [one] => Ok(PathBuf::from(one)),
        [] => Err(CliError::Usage(format!("missing {what}"))),
        more => Err(CliError::Usage(format!("expected one {what}, got {}", more.len()))),
    }
}

fn cmd_train(args: &Args) -> Result<(), CliError> {
    let path = one_positional(args, "config path")?;
    let mut cfg = RunConfig::load(&path)?;
    if let Some(base) = args.seed {
        cfg.seeds = SeedSpec::from_base(base);
    }
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    let log = run_experiment(&cfg)?;
    match (&log.aborted, log.terminal()) {
        (false, Some(t)) => println!(
            "run complete: {} steps={} mean_log_cond={:.4} score={:.4} frechet={:.6}",
            cfg.out_dir.display(),
            t.step,
            t.mean_log_cond,
            t.classifier_score,
            t.frechet_distance
        ),
        _ => println!(
            "run aborted: {} ({})",
            cfg.out_dir.display(),
            log.abort_reason.as_deref().unwrap_or("unknown")
        ),
    }
    Ok(())
}

fn cmd_sweep(args: &Args) -> Result<(), CliError> {
    let path = one_positional(args, "config path")?;
    let n_runs = args.runs.ok_or_else(|| CliError::Usage("sweep requires --runs".to_string()))?;
    let mut cfg = RunConfig::load(&path)?;
    if let Some(base) = args.seed {
        cfg.seeds = SeedSpec::from_base(base);
    }
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    let opts = SweepOptions {
        n_runs,
        vary_seeds: !args.fixed_seeds,
        parallel: args.parallel.unwrap_or(1),
    };
    let summary = sweep(&cfg, &opts)?;
    println!(
        "sweep complete: {} runs ({} ok) frechet mean={:.6} var={:.6e} | score mean={:.4} var={:.4e} | mean_log_cond mean={:.4} var={:.4e}",
        n_runs,
        summary.completed_runs,
        summary.terminal_frechet.mean,
        summary.terminal_frechet.variance,
        summary.terminal_score.mean,
        summary.terminal_score.variance,
        summary.terminal_mean_log_cond.mean,
        summary.terminal_mean_log_cond.variance,
    );
    for outcome in &summary.outcomes {
        if let Some(err) = &outcome.error {
            println!("  run-{:03}: failed: {err}", outcome.index);
        } else if outcome.aborted {
            println!("  run-{:03}: aborted", outcome.index);
        }
    }
    Ok(())
}

fn cmd_spectra(args: &Args) -> Result<(), CliError> {
    let path = one_positional(args, "checkpoint path")?;
    let generator = load_checkpoint(&path)?;
    let probe_size = args.probe.unwrap_or(64);
    let base = args.seed.unwrap_or(0);
    let latent_seed = super::config::derive_seed(base, "latent");
    let probe = sample_latent::<f64>(
        probe_size,
        generator.input_dim(),
        &mut Rng::seeded(latent_seed, "probe"),
        &format!("probe:latent-seed={latent_seed}"),
    )
    .map_err(HarnessError::from)?;
    let spectrum = average_jacobian_spectrum(&generator, &probe).map_err(HarnessError::from)?;
    let condition = mean_log_condition(&generator, &probe).map_err(HarnessError::from)?;

    let mut text = String::from("index,sigma,ln_sigma\n");
    for (i, &s) in spectrum.eigenvalues.iter().enumerate() {
        text.push_str(&format!("{i},{},{}\n", s, s.max(1e-300).ln()));
    }
    match &args.out {
        Some(out) => {
            std::fs::write(out, &text)
                .map_err(|e| HarnessError::Io { path: out.clone(), source: e })?;
            println!(
                "spectrum written to {} (mean_log_cond={:.6})",
                out.display(),
                condition.mean_log_condition
            );
        }
        None => {
            print!("{text}");
            println!("mean_log_cond={:.6}", condition.mean_log_condition);
        }
    }
    Ok(())
}

fn cmd_score(args: &Args) -> Result<(), CliError> {
    let gen_path = one_positional(args, "checkpoint path")?;
    let cls_path = args
        .classifier
        .clone()
        .ok_or_else(|| CliError::Usage("score requires --classifier".to_string()))?;
    let generator = load_checkpoint(&gen_path)?;
    let classifier = load_checkpoint(&cls_path)?;
    let samples = args.samples.unwrap_or(5000);
    let base = args.seed.unwrap_or(0);
    let latent_seed = super::config::derive_seed(base, "latent");
    let mut eval = Rng::seeded(latent_seed, "eval");
    let z = sample_latent::<f64>(samples, generator.input_dim(), &mut eval, "score")
        .map_err(HarnessError::from)?;
    let generated = generator.forward(&z.z).map_err(HarnessError::from)?;
    let score = classifier_score(&generated, &classifier).map_err(HarnessError::from)?;
    let modes = mode_report(&generated, &classifier).map_err(HarnessError::from)?;
    println!(
        "classifier_score={score} least_class={} least_count={} counts={:?}",
        modes.least_sampled_class, modes.least_count, modes.counts
    );
    Ok(())
}

fn cmd_memorize(args: &Args) -> Result<(), CliError> {
    let path = one_positional(args, "config path")?;
    let mut cfg = MemorizeConfig::load(&path)?;
    if let Some(base) = args.seed {
        cfg.seeds = SeedSpec::from_base(base);
    }
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    std::fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| HarnessError::Io { path: cfg.out_dir.clone(), source: e })?;

    let dataset = cfg.dataset.build(&cfg.seeds)?;
    let trained = train_classifier(&dataset, cfg.classifier_epochs, &mut Rng::seeded(cfg.seeds.data, "classifier"))
        .map_err(HarnessError::from)?;
    let result = train_memorizer(&dataset, &cfg.memorizer, &mut Rng::seeded(cfg.seeds.init, "memorizer"))
        .map_err(HarnessError::from)?;

    let probe = sample_latent::<f64>(
        cfg.probe_size,
        cfg.memorizer.n_z,
        &mut Rng::seeded(cfg.seeds.latent, "probe"),
        "probe",
    )
    .map_err(HarnessError::from)?;
    let condition = mean_log_condition(&result.generator, &probe).map_err(HarnessError::from)?;

    let memorized_out = result.generator.forward(&result.latents).map_err(HarnessError::from)?;
    let memorized_score =
        classifier_score(&memorized_out, &trained.classifier).map_err(HarnessError::from)?;
    let fresh_z = sample_latent::<f64>(
        cfg.score_samples,
        cfg.memorizer.n_z,
        &mut Rng::seeded(cfg.seeds.latent, "eval"),
        "fresh",
    )
    .map_err(HarnessError::from)?;
    let fresh_out = result.generator.forward(&fresh_z.z).map_err(HarnessError::from)?;
    let fresh_score =
        classifier_score(&fresh_out, &trained.classifier).map_err(HarnessError::from)?;
    let rms = result.reconstruction_rms().map_err(HarnessError::from)?;

    save_checkpoint(&result.generator, &cfg.out_dir.join("generator.ckpt"))?;
    save_checkpoint(&trained.classifier, &cfg.out_dir.join("classifier.ckpt"))?;
    let summary = serde_json::json!({
        "schema_version": super::config::CONFIG_SCHEMA_VERSION,
        "reconstruction_rms": rms,
        "mean_log_cond": condition.mean_log_condition,
        "memorized_score": memorized_score,
        "fresh_score": fresh_score,
        "epoch_losses": result.epoch_losses,
        "config": cfg,
    });
    let summary_path = cfg.out_dir.join("memorize_summary.json");
    std::fs::write(&summary_path, serde_json::to_string_pretty(&summary).unwrap() + "\n")
        .map_err(|e| HarnessError::Io { path: summary_path, source: e })?;
    println!(
        "memorizer complete: {} rms={rms:.6} mean_log_cond={:.4} memorized_score={memorized_score:.4} fresh_score={fresh_score:.4}",
        cfg.out_dir.display(),
        condition.mean_log_condition
    );
    Ok(())
}

fn cmd_vae(args: &Args) -> Result<(), CliError> {
    let path = one_positional(args, "config path")?;
    let mut cfg = VaeConfig::load(&path)?;
    if let Some(base) = args.seed {
        cfg.seeds = SeedSpec::from_base(base);
    }
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    std::fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| HarnessError::Io { path: cfg.out_dir.clone(), source: e })?;

    let dataset = cfg.dataset.build(&cfg.seeds)?;
    let result = train_vae(&dataset, cfg.latent_dim, &cfg.hidden, cfg.epochs, &mut Rng::seeded(cfg.seeds.init, "vae"))
        .map_err(HarnessError::from)?;

    let probe = sample_latent::<f64>(
        cfg.probe_size,
        cfg.latent_dim,
        &mut Rng::seeded(cfg.seeds.latent, "probe"),
        "probe",
    )
    .map_err(HarnessError::from)?;
    let spectrum = average_jacobian_spectrum(&result.decoder, &probe).map_err(HarnessError::from)?;
    let condition = mean_log_condition(&result.decoder, &probe).map_err(HarnessError::from)?;

    save_checkpoint(&result.decoder, &cfg.out_dir.join("decoder.ckpt"))?;
    let summary = serde_json::json!({
        "schema_version": super::config::CONFIG_SCHEMA_VERSION,
        "epoch_losses": result.epoch_losses,
        "mean_log_cond": condition.mean_log_condition,
        "terminal_spectrum": spectrum.eigenvalues,
        "config": cfg,
    });
    let summary_path = cfg.out_dir.join("vae_summary.json");
    std::fs::write(&summary_path, serde_json::to_string_pretty(&summary).unwrap() + "\n")
        .map_err(|e| HarnessError::Io { path: summary_path, source: e })?;
    println!(
        "vae complete: {} final_loss={:.6} mean_log_cond={:.4}",
        cfg.out_dir.display(),
        result.epoch_losses.last().copied().unwrap_or(f64::NAN),
        condition.mean_log_condition
    );
    Ok(())
}

fn cmd_report(args: &Args) -> Result<(), CliError> {
    let dir = one_positional(args, "run directory")?;
    let out = args.out.clone().unwrap_or_else(|| dir.join("report"));
    let paths = report(&dir, &out)?;
    println!(
        "report written to {}: {} charts, {} and {}",
        out.display(),
        paths.charts.len(),
        paths.timeseries_csv.file_name().unwrap().to_string_lossy(),
        paths.cluster_csv.file_name().unwrap().to_string_lossy()
    );
    Ok(())
}
