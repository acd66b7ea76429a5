use std::path::Path;

use serde::Serialize;

use super::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::reservoir::{DerivedConstants, ValidationReport};

#[derive(Debug, Clone, Serialize)]
pub struct ErrorSection {
    pub exit_code: i32,
    pub message: String,
}

/// Machine-readable record of one run, written as `report.json` next to the
/// CSV files even when the run fails part-way.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: ScenarioConfig,
    pub validation: ValidationReport,
    pub derived: Option<DerivedConstants>,
    /// `2 pi / delta_omega` of the configured bath grid.
    pub recurrence_horizon: f64,
    /// The bath oracle ran past its recurrence horizon.
    pub beyond_recurrence: bool,
    pub coverage: Option<f64>,
    pub files: Vec<String>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
    pub wall_time_s: f64,
    pub error: Option<ErrorSection>,
}

impl RunReport {
    pub fn new(config: &ScenarioConfig) -> Self {
        let validation = config.spec.validate();
        let derived = config.spec.derive_constants().ok();
        let n = config.bath.n_modes.max(2);
        let delta_omega = 2.0 * config.bath.cutoff / (n - 1) as f64;
        RunReport {
            config: config.clone(),
            validation,
            derived,
            recurrence_horizon: 2.0 * std::f64::consts::PI / delta_omega,
            beyond_recurrence: false,
            coverage: None,
            files: Vec::new(),
            warnings: Vec::new(),
            notes: Vec::new(),
            wall_time_s: 0.0,
            error: None,
        }
    }

    pub fn record_error(&mut self, error: &Error) {
        self.error = Some(ErrorSection { exit_code: error.exit_code(), message: error.to_string() });
    }

    pub fn exit_code(&self) -> i32 {
        self.error.as_ref().map_or(0, |e| e.exit_code)
    }

    pub fn is_success(&self) -> bool {
        self.error.is_none()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::write(dir.join("report.json"), self.to_json())?;
        Ok(())
    }
}
