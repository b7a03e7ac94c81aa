//! Report emission: merged CSV tables and SVG figures from run logs.

use super::runlog::{read_run_dir, RunLog, CSV_HEADER};
use super::svg::LineChart;
use super::sweep::cluster_stat;
use super::HarnessError;
use std::path::{Path, PathBuf};

/// Floor for log-scale spectrum plots; zero singular values plot at the
/// floor instead of negative infinity.
const LOG_PLOT_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone)]
pub struct ReportPaths {
    pub timeseries_csv: PathBuf,
    pub cluster_csv: PathBuf,
    pub charts: Vec<PathBuf>,
}

/// Render CSV tables and figures for every run found under `input`.
///
/// `input` is either a single run directory (contains `runlog.csv`) or a
/// sweep directory whose children are run directories.
pub fn report(input: &Path, out_dir: &Path) -> Result<ReportPaths, HarnessError> {
    let runs = discover_runs(input)?;
    let mut logs: Vec<(String, RunLog)> = Vec::with_capacity(runs.len());
    for dir in &runs {
        let name = dir
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".to_string());
        logs.push((name, read_run_dir(dir)?));
    }

    std::fs::create_dir_all(out_dir)
        .map_err(|e| HarnessError::Io { path: out_dir.to_path_buf(), source: e })?;

    // (a) merged per-run time series.
    let timeseries_csv = out_dir.join("timeseries.csv");
    let mut text = format!("run,{CSV_HEADER}\n");
    for (name, log) in &logs {
        for record in &log.records {
            text.push_str(name);
            text.push(',');
            text.push_str(&record.to_csv_row());
            text.push('\n');
        }
    }
    write_text(&timeseries_csv, &text)?;

    // (b) cluster summary with terminal values and inter-run statistics.
    let cluster_csv = out_dir.join("cluster_summary.csv");
    let mut text = String::from(
        "run,steps,aborted,terminal_mean_log_cond,terminal_classifier_score,\
         terminal_frechet_distance,terminal_least_class,terminal_least_count\n",
    );
    let mut mlc = Vec::new();
    let mut score = Vec::new();
    let mut fid = Vec::new();
    for (name, log) in &logs {
        if let Some(t) = log.terminal() {
            text.push_str(&format!(
                "{name},{},{},{},{},{},{},{}\n",
                t.step, log.aborted, t.mean_log_cond, t.classifier_score, t.frechet_distance,
                t.least_class, t.least_count
            ));
            if !log.aborted {
                mlc.push(t.mean_log_cond);
                score.push(t.classifier_score);
                fid.push(t.frechet_distance);
            }
        }
    }
    let (m, s, f) = (cluster_stat(&mlc), cluster_stat(&score), cluster_stat(&fid));
    text.push_str(&format!("mean,,,{},{},{},,\n", m.mean, s.mean, f.mean));
    text.push_str(&format!("variance,,,{},{},{},,\n", m.variance, s.variance, f.variance));
    write_text(&cluster_csv, &text)?;

    // (c) time-series charts, one colored polyline per run.
    type Pick = fn(&super::runlog::DiagRecord) -> f64;
    let mut charts = Vec::new();
    let series_of = |pick: Pick| {
        logs.iter()
            .map(|(name, log)| {
                (
                    name.clone(),
                    log.records
                        .iter()
                        .map(|r| (r.step as f64, pick(r)))
                        .collect::<Vec<_>>(),
                )
            })
            .collect::<Vec<_>>()
    };
    let chart_specs: [(&str, &str, Pick); 3] = [
        ("mean_log_cond", "mean log-condition number", |r| r.mean_log_cond),
        ("classifier_score", "classifier score", |r| r.classifier_score),
        ("frechet_distance", "Frechet distance", |r| r.frechet_distance),
    ];
    for (stem, label, pick) in chart_specs {
        let chart = LineChart {
            title: label.to_string(),
            x_label: "generator step".to_string(),
            y_label: label.to_string(),
            series: series_of(pick),
        };
        let path = out_dir.join(format!("{stem}.svg"));
        write_text(&path, &chart.render())?;
        charts.push(path);
    }

    // Terminal log-spectra overlay.
    let spectra_series: Vec<(String, Vec<(f64, f64)>)> = logs
        .iter()
        .filter_map(|(name, log)| {
            log.terminal_spectrum().map(|spec| {
                (
                    name.clone(),
                    spec.iter()
                        .enumerate()
                        .map(|(i, &s)| (i as f64, s.max(LOG_PLOT_FLOOR).ln()))
                        .collect(),
                )
            })
        })
        .collect();
    let chart = LineChart {
        title: "terminal average-Jacobian spectra (log scale)".to_string(),
        x_label: "singular value index".to_string(),
        y_label: "ln(sigma)".to_string(),
        series: spectra_series,
    };
    let path = out_dir.join("spectra.svg");
    write_text(&path, &chart.render())?;
    charts.push(path);

    Ok(ReportPaths { timeseries_csv, cluster_csv, charts })
}

/// Find run directories under `input`, sorted by name for determinism.
fn discover_runs(input: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    if input.join("runlog.csv").is_file() {
        return Ok(vec![input.to_path_buf()]);
    }
    let entries = std::fs::read_dir(input)
        .map_err(|e| HarnessError::Io { path: input.to_path_buf(), source: e })?;
    let mut runs = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| HarnessError::Io { path: input.to_path_buf(), source: e })?;
        let path = entry.path();
        if path.is_dir() && path.join("runlog.csv").is_file() {
            runs.push(path);
        }
    }
    runs.sort();
    if runs.is_empty() {
        return Err(HarnessError::NoRunsFound { dir: input.to_path_buf() });
    }
    Ok(runs)
}

fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    std::fs::write(path, text)
        .map_err(|e| HarnessError::Io { path: path.to_path_buf(), source: e })
}
