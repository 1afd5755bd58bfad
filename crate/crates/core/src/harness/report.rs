use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::harness::cv::{config_hash, CvResult};
use crate::metrics::MetricsReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::Config(format!("unknown report format '{other}'"))),
        }
    }
}

/// One table row: a dataset, the method that ran on it and its mean metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportEntry {
    pub dataset: String,
    pub method: String,
    pub report: MetricsReport,
}

impl ReportEntry {
    pub fn from_cv(dataset: &str, method: &str, result: &CvResult) -> Self {
        Self {
            dataset: dataset.to_string(),
            method: method.to_string(),
            report: result.mean_report,
        }
    }
}

fn fmt4(v: f64) -> String {
    format!("{v:.4}")
}

pub fn render_report(entries: &[ReportEntry], format: ReportFormat) -> String {
    let names = MetricsReport::FIELD_NAMES;
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            writeln!(out, "dataset,method,{}", names.join(",")).unwrap();
            for e in entries {
                let vals: Vec<String> = e.report.values().iter().map(|v| fmt4(*v)).collect();
                writeln!(out, "{},{},{}", e.dataset, e.method, vals.join(",")).unwrap();
            }
        }
        ReportFormat::Markdown => {
            writeln!(out, "| dataset | method | {} |", names.join(" | ")).unwrap();
            writeln!(out, "|{}", "---|".repeat(2 + names.len())).unwrap();
            for e in entries {
                let vals: Vec<String> = e.report.values().iter().map(|v| fmt4(*v)).collect();
                writeln!(out, "| {} | {} | {} |", e.dataset, e.method, vals.join(" | ")).unwrap();
            }
        }
    }
    out
}

/// Per-fold CSV: one row per fold followed by a `mean` row.
pub fn render_fold_csv(result: &CvResult) -> String {
    let mut out = String::new();
    writeln!(out, "fold,test_size,{}", MetricsReport::FIELD_NAMES.join(",")).unwrap();
    for (f, (r, n)) in result.fold_reports.iter().zip(&result.fold_sizes).enumerate() {
        let vals: Vec<String> = r.values().iter().map(|v| fmt4(*v)).collect();
        writeln!(out, "{f},{n},{}", vals.join(",")).unwrap();
    }
    let total: usize = result.fold_sizes.iter().sum();
    let vals: Vec<String> = result.mean_report.values().iter().map(|v| fmt4(*v)).collect();
    writeln!(out, "mean,{total},{}", vals.join(",")).unwrap();
    out
}

pub fn result_file_stem(dataset: &str, result: &CvResult) -> String {
    format!("{dataset}_{}fold_{}", result.k, config_hash(&result.config_snapshot))
}

/// Plain-text record of the seeds, configuration and inputs of a run.
pub fn render_manifest(dataset: &str, result: &CvResult, inputs: &[(&str, String)]) -> String {
    let s = &result.config_snapshot;
    let mut out = String::new();
    writeln!(out, "dataset = {dataset}").unwrap();
    for (key, value) in inputs {
        writeln!(out, "{key} = {value}").unwrap();
    }
    writeln!(out, "config_hash = {}", config_hash(s)).unwrap();
    writeln!(out, "k = {}", s.k).unwrap();
    writeln!(out, "fold_seed = {}", s.seed).unwrap();
    writeln!(out, "train_seed = {}", s.train.seed).unwrap();
    writeln!(out, "ae_seed = {}", s.train.ae.seed).unwrap();
    writeln!(out, "mode = {}", s.mode).unwrap();
    writeln!(out, "use_autoencoder = {}", s.use_autoencoder).unwrap();
    writeln!(out, "p = {}", s.expansion.p).unwrap();
    writeln!(out, "mu = {}", s.train.mu).unwrap();
    writeln!(out, "epochs = {}", s.train.epochs).unwrap();
    writeln!(out, "init_scale = {}", s.train.init_scale).unwrap();
    writeln!(out, "ae_learning_rate = {}", s.train.ae.learning_rate).unwrap();
    writeln!(out, "ae_epochs = {}", s.train.ae.epochs).unwrap();
    writeln!(out, "ae_hidden_fraction = {}", s.train.ae.hidden_fraction).unwrap();
    writeln!(out, "ae_init_scale = {}", s.train.ae.init_scale).unwrap();
    writeln!(out, "ae_act_encode = {}", s.train.ae.act_encode).unwrap();
    writeln!(out, "ae_act_decode = {}", s.train.ae.act_decode).unwrap();
    writeln!(out, "fold_sizes = {:?}", result.fold_sizes).unwrap();
    out
}

/// Writes `<stem>.csv` and `<stem>.manifest.txt` into `dir`, returning both paths.
pub fn write_cv_artifacts(
    dir: &Path,
    dataset: &str,
    result: &CvResult,
    inputs: &[(&str, String)],
) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stem = result_file_stem(dataset, result);
    let csv = dir.join(format!("{stem}.csv"));
    let manifest = dir.join(format!("{stem}.manifest.txt"));
    std::fs::write(&csv, render_fold_csv(result)).map_err(|e| Error::io(&csv, e))?;
    std::fs::write(&manifest, render_manifest(dataset, result, inputs)).map_err(|e| Error::io(&manifest, e))?;
    Ok((csv, manifest))
}

/// Reads one numeric column from a headed CSV, skipping any `mean` row.
pub fn read_metric_column(path: &Path, column: &str) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?
        .clone();
    let idx = headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| Error::Data(format!("{}: no column '{column}'", path.display())))?;
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        if record.get(0) == Some("mean") {
            continue;
        }
        let cell = record.get(idx).unwrap_or("");
        let v: f64 = cell.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: i + 2,
            msg: format!("'{cell}' in column '{column}' is not a number"),
        })?;
        values.push(v);
    }
    Ok(values)
}
