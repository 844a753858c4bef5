use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use super::config::ExperimentConfig;
use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepetitionRecord {
    pub repetition: usize,
    pub seed: u64,
    pub accuracy_pct: f64,
    pub nn_accuracy_pct: f64,
    pub train_accuracy_pct: f64,
    pub iterations: usize,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_seconds: Option<f64>,
}

/// Results of one method under one condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub method: String,
    pub condition: String,
    pub dataset: String,
    pub mean_accuracy_pct: f64,
    pub std_accuracy_pct: f64,
    pub mean_nn_accuracy_pct: f64,
    pub mean_train_accuracy_pct: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_train_seconds: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hardware: Option<String>,
    pub repetitions: Vec<RepetitionRecord>,
    pub warnings: Vec<String>,
    pub config: ExperimentConfig,
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

/// Short description of the machine, for timed runs.
pub fn hardware_summary() -> String {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    format!("{}-{} threads={}", std::env::consts::ARCH, std::env::consts::OS, threads)
}

impl Report {
    pub fn new(
        method: &str,
        cfg: &ExperimentConfig,
        dataset: String,
        repetitions: Vec<RepetitionRecord>,
        warnings: Vec<String>,
    ) -> Self {
        let acc = mean(repetitions.iter().map(|r| r.accuracy_pct));
        let var = mean(repetitions.iter().map(|r| (r.accuracy_pct - acc).powi(2)));
        let timing = cfg.record_timing;
        Report {
            method: method.to_string(),
            condition: cfg.source.describe(),
            dataset,
            mean_accuracy_pct: acc,
            std_accuracy_pct: var.sqrt(),
            mean_nn_accuracy_pct: mean(repetitions.iter().map(|r| r.nn_accuracy_pct)),
            mean_train_accuracy_pct: mean(repetitions.iter().map(|r| r.train_accuracy_pct)),
            mean_train_seconds: timing.then(|| mean(repetitions.iter().filter_map(|r| r.train_seconds))),
            hardware: timing.then(hardware_summary),
            repetitions,
            warnings,
            config: cfg.clone(),
        }
    }

    pub fn all_converged(&self) -> bool {
        self.repetitions.iter().all(|r| r.converged)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Table,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "table" => Ok(ReportFormat::Table),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::invalid(format!("unknown format '{other}' (expected table, csv or json)"))),
        }
    }
}

const CSV_HEADER: &str =
    "method,condition,accuracy_pct,train_seconds,repetition,nn_accuracy_pct,iterations,converged";

fn opt_secs(s: Option<f64>) -> String {
    s.map_or_else(String::new, |v| format!("{v:.3}"))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn emit_csv(reports: &[Report]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let (m, c) = (csv_field(&r.method), csv_field(&r.condition));
        for rep in &r.repetitions {
            let _ = writeln!(
                out,
                "{m},{c},{:.2},{},{},{:.2},{},{}",
                rep.accuracy_pct,
                opt_secs(rep.train_seconds),
                rep.repetition,
                rep.nn_accuracy_pct,
                rep.iterations,
                rep.converged
            );
        }
        let mean_iters = mean(r.repetitions.iter().map(|x| x.iterations as f64));
        let _ = writeln!(
            out,
            "{m},{c},{:.2},{},mean,{:.2},{:.1},{}",
            r.mean_accuracy_pct,
            opt_secs(r.mean_train_seconds),
            r.mean_nn_accuracy_pct,
            mean_iters,
            r.all_converged()
        );
    }
    out
}

fn emit_table(reports: &[Report]) -> String {
    let mut out = String::new();
    let timed = reports.iter().any(|r| r.mean_train_seconds.is_some());
    let _ = write!(
        out,
        "{:<10} {:<40} {:>14} {:>8} {:>8} {:>9}",
        "method", "condition", "accuracy %", "nn %", "train %", "converged"
    );
    if timed {
        let _ = write!(out, " {:>10}", "train s");
    }
    out.push('\n');
    for r in reports {
        let conv = r.repetitions.iter().filter(|x| x.converged).count();
        let _ = write!(
            out,
            "{:<10} {:<40} {:>7.2} ± {:<4.2} {:>8.2} {:>8.2} {:>9}",
            r.method,
            r.condition,
            r.mean_accuracy_pct,
            r.std_accuracy_pct,
            r.mean_nn_accuracy_pct,
            r.mean_train_accuracy_pct,
            format!("{conv}/{}", r.repetitions.len())
        );
        if timed {
            let _ = write!(out, " {:>10}", opt_secs(r.mean_train_seconds));
        }
        out.push('\n');
    }
    if let Some(hw) = reports.iter().find_map(|r| r.hardware.as_ref()) {
        let _ = writeln!(out, "hardware: {hw}");
    }
    for w in reports.iter().flat_map(|r| &r.warnings) {
        let _ = writeln!(out, "warning: {w}");
    }
    if let Some(r) = reports.first() {
        let cfg = serde_json::to_string(&r.config).expect("config serializes");
        let _ = writeln!(out, "config: {cfg}");
    }
    out
}

/// Renders reports. Output depends only on the reports, so untimed runs
/// with the same configuration are byte-identical.
pub fn emit_report(reports: &[Report], format: ReportFormat) -> String {
    match format {
        ReportFormat::Table => emit_table(reports),
        ReportFormat::Csv => emit_csv(reports),
        ReportFormat::Json => serde_json::to_string_pretty(reports).expect("report serializes") + "\n",
    }
}
