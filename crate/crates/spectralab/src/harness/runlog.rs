//! Per-run metric persistence: an append-only CSV with a fixed column
//! order, a spectra CSV, and a JSON terminal-summary sidecar.

use super::HarnessError;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Fixed column order of `runlog.csv`.
pub const CSV_HEADER: &str = "step,l_d,l_g,clamp_penalty,q_mean,q_max,mean_log_cond,\
floored_points,classifier_score,frechet_distance,least_class,least_count";

/// One diagnostic record; a complete CSV row.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DiagRecord {
    pub step: u64,
    pub l_d: f64,
    pub l_g: f64,
    pub clamp_penalty: f64,
    pub q_mean: f64,
    pub q_max: f64,
    pub mean_log_cond: f64,
    pub floored_points: usize,
    pub classifier_score: f64,
    pub frechet_distance: f64,
    pub least_class: usize,
    pub least_count: usize,
}

impl DiagRecord {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.step,
            self.l_d,
            self.l_g,
            self.clamp_penalty,
            self.q_mean,
            self.q_max,
            self.mean_log_cond,
            self.floored_points,
            self.classifier_score,
            self.frechet_distance,
            self.least_class,
            self.least_count
        )
    }

    pub fn from_csv_row(file: &Path, line_no: usize, row: &str) -> Result<Self, HarnessError> {
        let parse = |field: &str, what: &str| -> Result<f64, HarnessError> {
            field.parse::<f64>().map_err(|_| HarnessError::CsvParse {
                file: file.to_path_buf(),
                line: line_no,
                what: format!("bad {what}: {field:?}"),
            })
        };
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 12 {
            return Err(HarnessError::CsvParse {
                file: file.to_path_buf(),
                line: line_no,
                what: format!("expected 12 fields, got {}", fields.len()),
            });
        }
        Ok(DiagRecord {
            step: parse(fields[0], "step")? as u64,
            l_d: parse(fields[1], "l_d")?,
            l_g: parse(fields[2], "l_g")?,
            clamp_penalty: parse(fields[3], "clamp_penalty")?,
            q_mean: parse(fields[4], "q_mean")?,
            q_max: parse(fields[5], "q_max")?,
            mean_log_cond: parse(fields[6], "mean_log_cond")?,
            floored_points: parse(fields[7], "floored_points")? as usize,
            classifier_score: parse(fields[8], "classifier_score")?,
            frechet_distance: parse(fields[9], "frechet_distance")?,
            least_class: parse(fields[10], "least_class")? as usize,
            least_count: parse(fields[11], "least_count")? as usize,
        })
    }
}

/// Complete log of one training run.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RunLog {
    pub records: Vec<DiagRecord>,
    /// Average-Jacobian singular values per diagnostic step.
    pub spectra: Vec<(u64, Vec<f64>)>,
    pub aborted: bool,
    pub abort_reason: Option<String>,
}

impl RunLog {
    pub fn terminal(&self) -> Option<&DiagRecord> {
        self.records.last()
    }

    pub fn terminal_spectrum(&self) -> Option<&[f64]> {
        self.spectra.last().map(|(_, s)| s.as_slice())
    }
}

/// Terminal summary sidecar written next to the CSV logs.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub aborted: bool,
    pub abort_reason: Option<String>,
    pub steps_completed: u64,
    pub diagnostic_cadence: u64,
    pub classifier_accuracy: f64,
    pub generator_forward_rows: u64,
    pub terminal: Option<DiagRecord>,
    pub terminal_spectrum: Vec<f64>,
}

/// Incremental writer: every record is flushed before the training loop
/// continues, so an interrupted run leaves a parseable prefix.
pub struct RunLogWriter {
    runlog: std::io::BufWriter<std::fs::File>,
    spectra: std::io::BufWriter<std::fs::File>,
    runlog_path: PathBuf,
    spectra_wrote_header: bool,
}

impl RunLogWriter {
    pub fn create(dir: &Path) -> Result<Self, HarnessError> {
        let runlog_path = dir.join("runlog.csv");
        let spectra_path = dir.join("spectra.csv");
        let mut runlog = std::io::BufWriter::new(create_file(&runlog_path)?);
        writeln!(runlog, "{CSV_HEADER}")
            .map_err(|e| HarnessError::Io { path: runlog_path.clone(), source: e })?;
        let spectra = std::io::BufWriter::new(create_file(&spectra_path)?);
        Ok(RunLogWriter { runlog, spectra, runlog_path, spectra_wrote_header: false })
    }

    pub fn append(&mut self, record: &DiagRecord, spectrum: &[f64]) -> Result<(), HarnessError> {
        let io_err = |e| HarnessError::Io { path: self.runlog_path.clone(), source: e };
        writeln!(self.runlog, "{}", record.to_csv_row()).map_err(io_err)?;
        self.runlog.flush().map_err(|e| HarnessError::Io {
            path: self.runlog_path.clone(),
            source: e,
        })?;

        if !self.spectra_wrote_header {
            let header: Vec<String> =
                (0..spectrum.len()).map(|i| format!("sigma_{i}")).collect();
            writeln!(self.spectra, "step,{}", header.join(","))
                .map_err(|e| HarnessError::Io { path: self.runlog_path.clone(), source: e })?;
            self.spectra_wrote_header = true;
        }
        let values: Vec<String> = spectrum.iter().map(|v| format!("{v}")).collect();
        writeln!(self.spectra, "{},{}", record.step, values.join(","))
            .map_err(|e| HarnessError::Io { path: self.runlog_path.clone(), source: e })?;
        self.spectra
            .flush()
            .map_err(|e| HarnessError::Io { path: self.runlog_path.clone(), source: e })?;
        Ok(())
    }
}

fn create_file(path: &Path) -> Result<std::fs::File, HarnessError> {
    std::fs::File::create(path)
        .map_err(|e| HarnessError::Io { path: path.to_path_buf(), source: e })
}

/// Parse a `runlog.csv` + `spectra.csv` + `summary.json` triple back into a
/// `RunLog`. A missing or partial summary (crash) still yields the records.
pub fn read_run_dir(dir: &Path) -> Result<RunLog, HarnessError> {
    let runlog_path = dir.join("runlog.csv");
    let text = std::fs::read_to_string(&runlog_path)
        .map_err(|e| HarnessError::Io { path: runlog_path.clone(), source: e })?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        Some((_, header)) => {
            return Err(HarnessError::CsvParse {
                file: runlog_path,
                line: 1,
                what: format!("unexpected header {header:?}"),
            })
        }
        None => {
            return Err(HarnessError::CsvParse {
                file: runlog_path,
                line: 1,
                what: "empty file".to_string(),
            })
        }
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        records.push(DiagRecord::from_csv_row(&runlog_path, idx + 1, line)?);
    }

    let spectra_path = dir.join("spectra.csv");
    let mut spectra = Vec::new();
    if let Ok(text) = std::fs::read_to_string(&spectra_path) {
        for (idx, line) in text.lines().enumerate().skip(1) {
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let step = fields
                .next()
                .and_then(|s| s.parse::<u64>().ok())
                .ok_or_else(|| HarnessError::CsvParse {
                    file: spectra_path.clone(),
                    line: idx + 1,
                    what: "bad step".to_string(),
                })?;
            let values: Result<Vec<f64>, _> = fields.map(|f| f.parse::<f64>()).collect();
            let values = values.map_err(|_| HarnessError::CsvParse {
                file: spectra_path.clone(),
                line: idx + 1,
                what: "bad singular value".to_string(),
            })?;
            spectra.push((step, values));
        }
    }

    let summary_path = dir.join("summary.json");
    let (aborted, abort_reason) = match std::fs::read_to_string(&summary_path) {
        Ok(text) => match serde_json::from_str::<RunSummary>(&text) {
            Ok(summary) => (summary.aborted, summary.abort_reason),
            Err(_) => (false, None),
        },
        Err(_) => (false, None),
    };
    Ok(RunLog { records, spectra, aborted, abort_reason })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(step: u64) -> DiagRecord {
        DiagRecord {
            step,
            l_d: 1.25,
            l_g: 0.5,
            clamp_penalty: 0.0,
            q_mean: 2.5,
            q_max: 3.25,
            mean_log_cond: 4.125,
            floored_points: 1,
            classifier_score: 6.5,
            frechet_distance: 0.03125,
            least_class: 2,
            least_count: 40,
        }
    }

    #[test]
    fn csv_row_roundtrip() {
        let r = record(200);
        let row = r.to_csv_row();
        let back = DiagRecord::from_csv_row(Path::new("x.csv"), 2, &row).unwrap();
        assert_eq!(r, back);
    }

    #[test]
    fn writer_emits_parseable_prefix() {
        let dir = std::env::temp_dir().join(format!("spectralab-runlog-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        {
            let mut writer = RunLogWriter::create(&dir).unwrap();
            writer.append(&record(0), &[3.0, 2.0, 1.0]).unwrap();
            writer.append(&record(200), &[3.5, 2.5, 1.5]).unwrap();
            // Dropped without a summary: simulates a crash mid-run.
        }
        let log = read_run_dir(&dir).unwrap();
        assert_eq!(log.records.len(), 2);
        assert_eq!(log.records[1].step, 200);
        assert_eq!(log.spectra[1].1, vec![3.5, 2.5, 1.5]);
        assert!(!log.aborted);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn malformed_rows_name_file_and_line() {
        let err = DiagRecord::from_csv_row(Path::new("bad.csv"), 7, "1,2,3").unwrap_err();
        match err {
            HarnessError::CsvParse { line, .. } => assert_eq!(line, 7),
            other => panic!("unexpected {other:?}"),
        }
    }
}
