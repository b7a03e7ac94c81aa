//! Multi-run sweeps: independent seeded runs plus a cluster summary.

use super::config::RunConfig;
use super::run::{build_context, run_experiment_with_context};
use super::runlog::{DiagRecord, RunLog};
use super::HarnessError;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub n_runs: usize,
    /// When false every run reuses the base seeds; the summary flags it.
    pub vary_seeds: bool,
    /// Worker threads; runs are fully independent.
    pub parallel: usize,
}

impl SweepOptions {
    pub fn new(n_runs: usize) -> Self {
        SweepOptions { n_runs, vary_seeds: true, parallel: 1 }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct RunOutcome {
    pub index: usize,
    pub dir: PathBuf,
    pub aborted: bool,
    pub error: Option<String>,
    pub terminal: Option<DiagRecord>,
    #[serde(skip)]
    pub log: Option<RunLog>,
}

/// Mean and unbiased variance over completed runs.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ClusterStat {
    pub mean: f64,
    pub variance: f64,
}

pub fn cluster_stat(values: &[f64]) -> ClusterStat {
    if values.is_empty() {
        return ClusterStat { mean: 0.0, variance: 0.0 };
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = if values.len() < 2 {
        0.0
    } else {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
    };
    ClusterStat { mean, variance }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepSummary {
    pub outcomes: Vec<RunOutcome>,
    pub completed_runs: usize,
    pub terminal_frechet: ClusterStat,
    pub terminal_score: ClusterStat,
    pub terminal_mean_log_cond: ClusterStat,
    /// Set when n_runs > 1 but every run shares identical seeds.
    pub duplicate_seeds: bool,
}

/// Run `n_runs` variations of `base`, varying only the per-run seeds.
///
/// The dataset and scoring classifier derive from the shared data stream,
/// so runs are identical up to initialization, latent draws, and clamp
/// noise. Runs execute independently (optionally in parallel) and a
/// failure in one is recorded without stopping the rest.
pub fn sweep(base: &RunConfig, opts: &SweepOptions) -> Result<SweepSummary, HarnessError> {
    if opts.n_runs == 0 {
        return Err(HarnessError::Config("sweep needs n_runs >= 1".to_string()));
    }
    base.validate()?;
    let ctx = build_context(base)?;

    let mut configs = Vec::with_capacity(opts.n_runs);
    for i in 0..opts.n_runs {
        let mut cfg = base.clone();
        if opts.vary_seeds {
            cfg.seeds = base.seeds.for_run(i);
        }
        cfg.out_dir = base.out_dir.join(format!("run-{i:03}"));
        configs.push(cfg);
    }
    let duplicate_seeds = !opts.vary_seeds && opts.n_runs > 1;
    if duplicate_seeds {
        eprintln!(
            "warning: sweep runs share identical seeds; inter-run variance will be zero"
        );
    }

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<RunOutcome>>> = Mutex::new(vec![None; opts.n_runs]);
    let workers = opts.parallel.clamp(1, opts.n_runs);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= configs.len() {
                    break;
                }
                let cfg = &configs[i];
                let outcome = match run_experiment_with_context(cfg, &ctx) {
                    Ok(log) => RunOutcome {
                        index: i,
                        dir: cfg.out_dir.clone(),
                        aborted: log.aborted,
                        error: None,
                        terminal: log.terminal().cloned(),
                        log: Some(log),
                    },
                    Err(e) => RunOutcome {
                        index: i,
                        dir: cfg.out_dir.clone(),
                        aborted: false,
                        error: Some(e.to_string()),
                        terminal: None,
                        log: None,
                    },
                };
                if let Some(slot) = results.lock().expect("no poisoned runs").get_mut(i) {
                    *slot = Some(outcome);
                }
            });
        }
    });

    let outcomes: Vec<RunOutcome> = results
        .into_inner()
        .expect("sweep workers joined")
        .into_iter()
        .map(|o| o.expect("every run produced an outcome"))
        .collect();

    let completed: Vec<&DiagRecord> = outcomes
        .iter()
        .filter(|o| !o.aborted && o.error.is_none())
        .filter_map(|o| o.terminal.as_ref())
        .collect();
    let frechet: Vec<f64> = completed.iter().map(|t| t.frechet_distance).collect();
    let score: Vec<f64> = completed.iter().map(|t| t.classifier_score).collect();
    let mlc: Vec<f64> = completed.iter().map(|t| t.mean_log_cond).collect();

    let summary = SweepSummary {
        completed_runs: completed.len(),
        terminal_frechet: cluster_stat(&frechet),
        terminal_score: cluster_stat(&score),
        terminal_mean_log_cond: cluster_stat(&mlc),
        duplicate_seeds,
        outcomes,
    };

    let summary_path = base.out_dir.join("sweep_summary.json");
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    std::fs::write(&summary_path, text + "\n")
        .map_err(|e| HarnessError::Io { path: summary_path, source: e })?;
    Ok(summary)
}
