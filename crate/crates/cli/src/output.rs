//! Result aggregation and file emission.
//!
//! Per-trial records go to `<prefix>.trials.csv` (`trial,statistic,value`,
//! one row per trial per statistic, 17 significant digits); aggregates,
//! bound values, and the full config echo go to `<prefix>.summary.json`.
//! The CSV bytes are a pure function of the config, whatever the
//! concurrency level.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::error::CliError;
use permcast_core::stats;

/// One named per-trial value sequence, with the tail thresholds its
/// aggregate should report.
#[derive(Debug, Clone)]
pub struct StatSeries {
    pub name: String,
    pub values: Vec<f64>,
    pub tail_thresholds: Vec<f64>,
}

impl StatSeries {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            values,
            tail_thresholds: Vec::new(),
        }
    }

    pub fn with_tails(mut self, thresholds: &[f64]) -> Self {
        self.tail_thresholds = thresholds.to_vec();
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
}

impl NamedValue {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Quantiles {
    pub p05: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub p95: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TailProbability {
    pub threshold: f64,
    pub probability: f64,
}

/// Aggregate of one statistic; all fields are null when the series is empty.
#[derive(Debug, Clone, Serialize)]
pub struct Aggregate {
    pub statistic: String,
    pub count: usize,
    pub mean: Option<f64>,
    pub standard_error: Option<f64>,
    pub quantiles: Option<Quantiles>,
    pub tail_probabilities: Vec<TailProbability>,
}

impl Aggregate {
    pub fn from_series(series: &StatSeries) -> Self {
        if series.values.is_empty() {
            return Self {
                statistic: series.name.clone(),
                count: 0,
                mean: None,
                standard_error: None,
                quantiles: None,
                tail_probabilities: Vec::new(),
            };
        }
        let (mean, se) = stats::mean_se(&series.values);
        let mut sorted = series.values.clone();
        stats::sort_f64(&mut sorted);
        let q = Quantiles {
            p05: stats::quantile_sorted(&sorted, 0.05),
            p25: stats::quantile_sorted(&sorted, 0.25),
            p50: stats::quantile_sorted(&sorted, 0.50),
            p75: stats::quantile_sorted(&sorted, 0.75),
            p95: stats::quantile_sorted(&sorted, 0.95),
        };
        let tails = series
            .tail_thresholds
            .iter()
            .map(|&t| TailProbability {
                threshold: t,
                probability: stats::tail_fraction(&series.values, t),
            })
            .collect();
        Self {
            statistic: series.name.clone(),
            count: series.values.len(),
            mean: Some(mean),
            standard_error: Some(se),
            quantiles: Some(q),
            tail_probabilities: tails,
        }
    }
}

/// Everything a scenario run produces.
#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub scenario: String,
    pub config: ScenarioConfig,
    pub series: Vec<StatSeries>,
    pub bounds: Vec<NamedValue>,
    /// Scenario-specific structured extras (scan tables, KS results, ...).
    pub extra: serde_json::Map<String, serde_json::Value>,
    pub duration_seconds: f64,
}

impl ScenarioResult {
    pub fn new(config: &ScenarioConfig, started: Instant) -> Self {
        Self {
            scenario: config.scenario.clone(),
            config: config.clone(),
            series: Vec::new(),
            bounds: Vec::new(),
            extra: serde_json::Map::new(),
            duration_seconds: started.elapsed().as_secs_f64(),
        }
    }

    pub fn aggregates(&self) -> Vec<Aggregate> {
        self.series.iter().map(Aggregate::from_series).collect()
    }

    /// CSV bytes: header, then rows grouped by statistic in emission order,
    /// trials ascending, values at 17 significant digits.
    pub fn trials_csv(&self) -> String {
        let mut out = String::from("trial,statistic,value\n");
        for series in &self.series {
            for (t, v) in series.values.iter().enumerate() {
                out.push_str(&format!("{t},{},{:.16e}\n", series.name, v));
            }
        }
        out
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "artifact": { "name": "permcast", "version": env!("CARGO_PKG_VERSION") },
            "scenario": self.scenario,
            "config": self.config,
            "aggregates": self.aggregates(),
            "bounds": self.bounds,
            "extra": self.extra,
            "duration_seconds": self.duration_seconds,
        })
    }
}

/// Write `<prefix>.summary.json` and `<prefix>.trials.csv`; returns the two
/// paths. Parent directories are created as needed.
pub fn write_results(
    result: &ScenarioResult,
    prefix: &Path,
) -> Result<(PathBuf, PathBuf), CliError> {
    let summary_path = prefix.with_extension("summary.json");
    let csv_path = prefix.with_extension("trials.csv");
    if let Some(parent) = prefix.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::io(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    let summary = serde_json::to_string_pretty(&result.summary_json())
        .map_err(|e| CliError::io(format!("summary serialization: {e}")))?;
    std::fs::write(&summary_path, summary.as_bytes())
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", summary_path.display())))?;
    std::fs::write(&csv_path, result.trials_csv().as_bytes())
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", csv_path.display())))?;
    Ok((summary_path, csv_path))
}

/// Parse a trials CSV back into (statistic -> values in trial order).
/// Used by the round-trip consistency checks.
pub fn parse_trials_csv(text: &str) -> Result<Vec<(String, Vec<f64>)>, CliError> {
    let mut out: Vec<(String, Vec<f64>)> = Vec::new();
    let mut lines = text.lines();
    match lines.next() {
        Some("trial,statistic,value") => {}
        other => {
            return Err(CliError::validation(format!("bad CSV header: {other:?}")));
        }
    }
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut parts = line.splitn(3, ',');
        let _trial = parts.next();
        let stat = parts.next().ok_or_else(|| {
            CliError::validation(format!("line {}: missing statistic", lineno + 2))
        })?;
        let value: f64 = parts
            .next()
            .ok_or_else(|| CliError::validation(format!("line {}: missing value", lineno + 2)))?
            .parse()
            .map_err(|e| CliError::validation(format!("line {}: {e}", lineno + 2)))?;
        match out.iter_mut().find(|(name, _)| name == stat) {
            Some((_, values)) => values.push(value),
            None => out.push((stat.to_string(), vec![value])),
        }
    }
    Ok(out)
}
