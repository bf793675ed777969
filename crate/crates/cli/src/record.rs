use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Kind};
use crate::CliError;

/// How a metric is judged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "rule")]
pub enum Check {
    /// `|value - reference| <= sigmas * stderr`.
    Sigmas { sigmas: f64 },
    /// `|value / reference - 1| <= relative`.
    Relative { relative: f64 },
    /// Passes when either of the two bounds holds.
    RelativeOrSigmas { relative: f64, sigmas: f64 },
    /// `value <= bound`.
    AtMost { bound: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
}

impl Metric {
    pub fn value(name: &str, value: f64) -> Self {
        Metric { name: name.to_string(), value, stderr: None, reference: None, check: None, pass: None }
    }

    pub fn estimate(name: &str, value: f64, stderr: f64) -> Self {
        Metric { stderr: Some(stderr), ..Metric::value(name, value) }
    }

    /// Attaches a reference and evaluates `check` against it.
    pub fn judged(mut self, reference: Option<f64>, check: Check) -> Self {
        let se = self.stderr.unwrap_or(0.0);
        let v = self.value;
        let pass = match (check, reference) {
            (Check::AtMost { bound }, _) => v <= bound,
            (Check::Sigmas { sigmas }, Some(r)) => (v - r).abs() <= sigmas * se,
            (Check::Relative { relative }, Some(r)) => (v / r - 1.0).abs() <= relative,
            (Check::RelativeOrSigmas { relative, sigmas }, Some(r)) => {
                (v / r - 1.0).abs() <= relative || (v - r).abs() <= sigmas * se
            }
            (_, None) => false,
        };
        self.reference = reference;
        self.check = Some(check);
        self.pass = Some(pass);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub kind: Kind,
    /// SHA-256 of the canonical config (with the effective seed filled in).
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub seed: u64,
    pub code_version: String,
    pub threads: usize,
    pub tolerance_scale: f64,
    pub wall_time_s: f64,
    /// Data files written next to the record.
    pub outputs: Vec<String>,
    pub metrics: Vec<Metric>,
    pub passed: bool,
}

impl RunRecord {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read record {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid run record {}: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("record serialises");
        std::fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    pub fn metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.name == name)
    }
}
