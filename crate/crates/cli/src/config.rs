//! Scenario configuration: a JSON object, with CLI flags layered on top.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use permcast_core::FieldKind;

pub const SCENARIOS: &[&str] = &[
    "unbiasedness",
    "concentration",
    "upper_tail",
    "cutoff_concentration",
    "tail_statistic",
    "flat_distribution",
    "yn_coverage",
    "gamma_constant",
    "laguerre_density",
    "identities",
];

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: String,
    pub seed: u64,
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<[usize; 2]>,
    /// (n, m) sweep for the scenarios that scan matrix sizes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    /// Sparse-column ensemble parameters (tail_statistic variant).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Determinant draws per averaged estimate (yn_coverage); overrides rho.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples_per_estimate: Option<usize>,
    /// Total-draw cap for averaged-estimator scenarios.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_file: Option<PathBuf>,
    /// Output path prefix for `<prefix>.summary.json` / `<prefix>.trials.csv`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Worker count; defaults to available parallelism. Results are
    /// identical at any level.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concurrency: Option<usize>,
}

impl ScenarioConfig {
    pub fn new(scenario: &str, seed: u64, trials: usize) -> Self {
        Self {
            scenario: scenario.to_string(),
            seed,
            trials,
            shape: None,
            sweep: None,
            bounds: None,
            field: None,
            epsilon: None,
            s: None,
            delta: None,
            alpha: None,
            rho: None,
            gamma: None,
            theta: None,
            samples_per_estimate: None,
            budget: None,
            matrix_file: None,
            output: None,
            concurrency: None,
        }
    }

    /// Parse a config file: either a bare config object or a previously
    /// written summary (whose `config` field is then extracted), so that a
    /// run can be reproduced straight from its own summary.
    pub fn from_json_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read config {}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::validation(format!("config {}: {e}", path.display())))?;
        let config_value = match value.get("config") {
            Some(inner) if inner.is_object() => inner.clone(),
            _ => value,
        };
        serde_json::from_value(config_value)
            .map_err(|e| CliError::validation(format!("config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !SCENARIOS.contains(&self.scenario.as_str()) {
            return Err(CliError::validation(format!(
                "unknown scenario '{}'; expected one of {SCENARIOS:?}",
                self.scenario
            )));
        }
        if self.trials == 0 {
            return Err(CliError::validation("trials must be positive"));
        }
        if let Some([n, m]) = self.shape {
            if n == 0 || m == 0 || m > n {
                return Err(CliError::validation(format!("invalid shape ({n}, {m})")));
            }
        }
        if let Some([a, b]) = self.bounds {
            if !(a.is_finite() && b.is_finite()) || a < 0.0 || a > b || b <= 0.0 {
                return Err(CliError::validation(format!("invalid bounds [{a}, {b}]")));
            }
        }
        if let Some(f) = &self.field {
            parse_field(f)?;
        }
        for (name, v) in [
            ("epsilon", self.epsilon),
            ("delta", self.delta),
            ("s", self.s),
        ] {
            if let Some(v) = v {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(CliError::validation(format!("{name} must be positive")));
                }
            }
        }
        if let Some(c) = self.concurrency {
            if c == 0 {
                return Err(CliError::validation("concurrency must be positive"));
            }
        }
        Ok(())
    }

    pub fn field_kind(&self) -> Result<FieldKind, CliError> {
        match &self.field {
            None => Ok(FieldKind::Real),
            Some(f) => parse_field(f),
        }
    }

    pub fn effective_concurrency(&self) -> usize {
        self.concurrency.unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
    }

    pub fn bounds_or(&self, lo: f64, hi: f64) -> (f64, f64) {
        match self.bounds {
            Some([a, b]) => (a, b),
            None => (lo, hi),
        }
    }
}

pub fn parse_field(name: &str) -> Result<FieldKind, CliError> {
    match name.to_ascii_lowercase().as_str() {
        "real" => Ok(FieldKind::Real),
        "complex" => Ok(FieldKind::Complex),
        other => Err(CliError::validation(format!(
            "unknown field '{other}': expected 'real' or 'complex'"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_configs() {
        let mut c = ScenarioConfig::new("unbiasedness", 1, 0);
        assert!(c.validate().is_err());
        c.trials = 10;
        assert!(c.validate().is_ok());
        c.scenario = "nope".into();
        assert!(c.validate().is_err());
        c.scenario = "unbiasedness".into();
        c.shape = Some([2, 5]);
        assert!(c.validate().is_err());
        c.shape = Some([5, 2]);
        c.bounds = Some([2.0, 1.0]);
        assert!(c.validate().is_err());
    }

    #[test]
    fn summary_roundtrip_extracts_config() {
        let c = ScenarioConfig::new("gamma_constant", 7, 3);
        let summary = serde_json::json!({
            "scenario": "gamma_constant",
            "config": serde_json::to_value(&c).unwrap(),
        });
        let dir = std::env::temp_dir().join("permcast-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("summary.json");
        std::fs::write(&path, serde_json::to_string(&summary).unwrap()).unwrap();
        let parsed = ScenarioConfig::from_json_file(&path).unwrap();
        assert_eq!(parsed, c);
    }
}
