//! Figure presets.

use std::path::PathBuf;

use super::config::{BathConfig, ComputationPath, EtaSweep, OutputKind, ScenarioConfig};
use crate::error::{Error, Result};
use crate::reservoir::ReservoirSpec;

pub const PRESET_NAMES: [&str; 11] =
    ["fig1a", "fig1b", "fig2a", "fig2b", "fig2c", "fig2d", "fig3", "fig4a", "fig4b", "fig5", "fig7"];

/// Command-line overrides applied on top of a preset or a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub tol: Option<f64>,
    pub modes: Option<usize>,
    pub cutoff: Option<f64>,
    pub t_max: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, config: &mut ScenarioConfig) {
        if let Some(dir) = &self.out_dir {
            config.output_dir = dir.clone();
        }
        if let Some(tol) = self.tol {
            config.tol = tol;
        }
        if let Some(n) = self.modes {
            config.bath.n_modes = n;
        }
        if let Some(cutoff) = self.cutoff {
            config.bath.cutoff = cutoff;
        }
        if let Some(t_max) = self.t_max {
            config.t_max = t_max;
        }
    }
}

fn weak_coupling() -> ReservoirSpec {
    ReservoirSpec::perfect_gap(10.0, 0.2, 1.0)
}

fn strong_coupling() -> ReservoirSpec {
    ReservoirSpec::perfect_gap(0.5, 0.01, 1.0)
}

/// The scenario reproducing one figure, writing into `out/<name>`.
pub fn preset(name: &str) -> Result<ScenarioConfig> {
    use ComputationPath::*;
    use OutputKind::*;

    let spec = match name {
        "fig2b" | "fig2d" | "fig4b" => strong_coupling(),
        n if PRESET_NAMES.contains(&n) => weak_coupling(),
        other => {
            return Err(Error::Argument(format!(
                "unknown preset '{other}'; valid presets are: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    let mut cfg = ScenarioConfig::minimal(spec);
    cfg.name = Some(name.to_owned());
    cfg.output_dir = PathBuf::from("out").join(name);
    cfg.bath = BathConfig::default();
    match name {
        "fig1a" => {
            cfg.paths = vec![Analytic, PseudomodeOde];
            cfg.outputs = vec![Populations];
        }
        "fig1b" => {
            cfg.paths = vec![Analytic];
            cfg.outputs = vec![TrappingSweep];
            cfg.eta_sweep = Some(EtaSweep { min: 0.05, max: 10.0, points: 50, include: Some(vec![1.0]) });
        }
        "fig2a" | "fig2b" => {
            cfg.paths = vec![BathOracle];
            cfg.outputs = vec![Spectrum];
            cfg.t_steps = 101;
        }
        "fig2c" | "fig2d" => {
            cfg.paths = vec![BathOracle];
            cfg.outputs = vec![Spectrum];
            cfg.t_steps = 101;
            cfg.snapshot_times = vec![50.0];
            cfg.lorentzian_reference = true;
        }
        "fig3" => {
            cfg.paths = vec![BathOracle];
            cfg.outputs = vec![Currents, Populations];
            cfg.window = 2.0;
        }
        "fig4a" | "fig4b" => {
            cfg.paths = vec![Analytic, PseudomodeOde];
            cfg.outputs = vec![Concurrences];
        }
        "fig5" => {
            cfg.paths = vec![BathOracle];
            cfg.outputs = vec![Densities];
            cfg.t_steps = 101;
            cfg.window = 2.0;
            cfg.snapshot_times = vec![10.0, 30.0];
            cfg.reference_mode_offset = Some(0.1);
        }
        "fig7" => {
            cfg.paths = vec![BathOracle];
            cfg.outputs = vec![Totals];
        }
        _ => unreachable!(),
    }
    Ok(cfg)
}
