//! Scenario driver behind the `gapsim` binary.

pub mod config;
pub mod output;
pub mod presets;
pub mod report;
pub mod run;

pub use config::{ComputationPath, OutputKind, ScenarioConfig, Units, SCHEMA_VERSION};
pub use presets::{preset, Overrides, PRESET_NAMES};
pub use report::RunReport;
pub use run::run_scenario;

use crate::error::Result;

/// Run a named figure preset with optional overrides.
pub fn run_preset(name: &str, overrides: &Overrides) -> Result<RunReport> {
    let mut cfg = preset(name)?;
    overrides.apply(&mut cfg);
    Ok(run_scenario(&cfg))
}

/// Run the scenario described by a JSON config file.
pub fn run_config(path: &std::path::Path, overrides: &Overrides) -> Result<RunReport> {
    let mut cfg = ScenarioConfig::load(path)?;
    overrides.apply(&mut cfg);
    Ok(run_scenario(&cfg))
}
