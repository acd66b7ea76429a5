//! Scenario configuration: the JSON schema read by `gapsim run`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reservoir::ReservoirSpec;

pub const SCHEMA_VERSION: u32 = 1;

/// Snapshot times must sit on the uniform time grid within this distance.
const GRID_MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComputationPath {
    Analytic,
    PseudomodeOde,
    BathOracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Populations,
    Spectrum,
    Currents,
    Concurrences,
    Densities,
    Totals,
    /// Long-time populations as a function of the dimensionless coupling.
    TrappingSweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    /// Every rate and frequency is measured in units of the coupling strength,
    /// which must then be 1.
    #[default]
    Omega0,
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    #[serde(default = "default_modes")]
    pub n_modes: usize,
    #[serde(default = "default_cutoff")]
    pub cutoff: f64,
}

impl Default for BathConfig {
    fn default() -> Self {
        BathConfig { n_modes: default_modes(), cutoff: default_cutoff() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtaSweep {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    /// Extra eta values merged into the log-spaced sweep.
    #[serde(default)]
    pub include: Option<Vec<f64>>,
}

impl EtaSweep {
    pub fn values(&self) -> Vec<f64> {
        let mut out: Vec<f64> = match self.points {
            0 => Vec::new(),
            1 => vec![self.min],
            n => {
                let (lo, hi) = (self.min.ln(), self.max.ln());
                (0..n).map(|k| (lo + (hi - lo) * k as f64 / (n - 1) as f64).exp()).collect()
            }
        };
        for &x in self.include.iter().flatten() {
            if !out.iter().any(|&y| (y - x).abs() <= 1e-12 * x.abs()) {
                out.push(x);
            }
        }
        out.sort_by(|a, b| a.total_cmp(b));
        out
    }
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}
fn default_paths() -> Vec<ComputationPath> {
    vec![ComputationPath::PseudomodeOde]
}
fn default_outputs() -> Vec<OutputKind> {
    vec![OutputKind::Populations]
}
fn default_t_max() -> f64 {
    50.0
}
fn default_t_steps() -> usize {
    501
}
fn default_modes() -> usize {
    4000
}
fn default_cutoff() -> f64 {
    40.0
}
fn default_tol() -> f64 {
    1e-9
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_window() -> f64 {
    5.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    #[serde(default)]
    pub name: Option<String>,
    pub spec: ReservoirSpec,
    #[serde(default)]
    pub units: Units,
    #[serde(default = "default_paths")]
    pub paths: Vec<ComputationPath>,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_t_steps")]
    pub t_steps: usize,
    #[serde(default)]
    pub bath: BathConfig,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<OutputKind>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Half-width of the frequency window exported in frequency-resolved files.
    #[serde(default = "default_window")]
    pub window: f64,
    /// Times at which whole-spectrum or mode-mode snapshots are written.
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    /// Offset from `omega_c` of the mode whose mode-mode density row is exported.
    #[serde(default)]
    pub reference_mode_offset: Option<f64>,
    /// Also integrate a single Lorentzian of width `gamma1` on the same grid.
    #[serde(default)]
    pub lorentzian_reference: bool,
    #[serde(default)]
    pub eta_sweep: Option<EtaSweep>,
}

impl ScenarioConfig {
    pub fn minimal(spec: ReservoirSpec) -> Self {
        ScenarioConfig {
            schema_version: SCHEMA_VERSION,
            name: None,
            spec,
            units: Units::default(),
            paths: default_paths(),
            t_max: default_t_max(),
            t_steps: default_t_steps(),
            bath: BathConfig::default(),
            tol: default_tol(),
            outputs: default_outputs(),
            output_dir: default_output_dir(),
            window: default_window(),
            snapshot_times: Vec::new(),
            reference_mode_offset: None,
            lorentzian_reference: false,
            eta_sweep: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::Config(format!("line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn has_path(&self, path: ComputationPath) -> bool {
        self.paths.contains(&path)
    }

    pub fn wants(&self, output: OutputKind) -> bool {
        self.outputs.contains(&output)
    }

    pub fn times(&self) -> Vec<f64> {
        crate::dynamics::uniform_times(self.t_max, self.t_steps)
    }

    /// Index of a snapshot time on the time grid.
    pub fn grid_index(&self, t: f64) -> Option<usize> {
        if self.t_steps < 2 {
            return (t.abs() <= GRID_MATCH_TOL).then_some(0);
        }
        let step = self.t_max / (self.t_steps - 1) as f64;
        let k = (t / step).round();
        (k >= 0.0 && (k as usize) < self.t_steps && (k * step - t).abs() <= GRID_MATCH_TOL).then_some(k as usize)
    }

    /// Checks that need no numerics. Requested outputs must be computable from
    /// the requested paths.
    pub fn check(&self) -> Result<()> {
        use ComputationPath::*;
        use OutputKind::*;

        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.units == Units::Omega0 && self.spec.omega_big0 != 1.0 {
            return Err(Error::Config(format!(
                "units = omega0 requires spec.omega_big0 = 1, got {}",
                self.spec.omega_big0
            )));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::Config(format!("t_max must be finite and > 0, got {}", self.t_max)));
        }
        if self.t_steps < 2 {
            return Err(Error::Config(format!("t_steps must be >= 2, got {}", self.t_steps)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tol must be > 0, got {}", self.tol)));
        }
        if !(self.window > 0.0) {
            return Err(Error::Config(format!("window must be > 0, got {}", self.window)));
        }
        if self.outputs.is_empty() {
            return Err(Error::Config("outputs is empty".into()));
        }
        let bath_amplitudes = self.has_path(BathOracle) || self.has_path(Analytic);
        for output in &self.outputs {
            let ok = match output {
                Populations => !self.paths.is_empty(),
                Concurrences => self.has_path(Analytic) || self.has_path(PseudomodeOde),
                Spectrum | Currents | Densities | Totals => bath_amplitudes,
                TrappingSweep => true,
            };
            if !ok {
                let need = match output {
                    Populations => "any computation path",
                    Concurrences => "pseudomode amplitudes (analytic or pseudomode_ode)",
                    _ => "bath amplitudes (bath_oracle or analytic)",
                };
                return Err(Error::Config(format!(
                    "output {} is incompatible with paths {:?}: it needs {need}",
                    json_name(output),
                    self.paths.iter().map(json_name).collect::<Vec<_>>()
                )));
            }
        }
        if self.wants(TrappingSweep) && self.eta_sweep.is_none() {
            return Err(Error::Config("trapping_sweep output needs an eta_sweep block".into()));
        }
        if let Some(sweep) = &self.eta_sweep {
            if !(sweep.min > 0.0 && sweep.max >= sweep.min) {
                return Err(Error::Config("eta_sweep needs 0 < min <= max".into()));
            }
        }
        let uses_bath = self.has_path(BathOracle)
            || bath_amplitudes && self.outputs.iter().any(|o| matches!(o, Spectrum | Currents | Densities | Totals));
        if uses_bath && (self.bath.n_modes < 2 || !(self.bath.cutoff > 0.0)) {
            return Err(Error::Config("bath needs n_modes >= 2 and cutoff > 0".into()));
        }
        for &t in &self.snapshot_times {
            if self.grid_index(t).is_none() {
                return Err(Error::Config(format!(
                    "snapshot time {t} is not on the time grid (t_max {}, t_steps {})",
                    self.t_max, self.t_steps
                )));
            }
        }
        if self.lorentzian_reference && !self.has_path(BathOracle) {
            return Err(Error::Config("lorentzian_reference needs the bath_oracle path".into()));
        }
        Ok(())
    }
}

pub(crate) fn json_name<T: Serialize>(value: &T) -> String {
    serde_json::to_value(value)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = ScenarioConfig::from_json(
            r#"{"spec": {"gamma1": 10.0, "gamma2": 0.2, "w1": 1.0204081632653061, "w2": 0.02040816326530612}}"#,
        )
        .unwrap();
        assert_eq!(cfg.schema_version, SCHEMA_VERSION);
        assert_eq!(cfg.paths, vec![ComputationPath::PseudomodeOde]);
        assert_eq!(cfg.outputs, vec![OutputKind::Populations]);
        assert_eq!(cfg.bath, BathConfig { n_modes: 4000, cutoff: 40.0 });
        assert_eq!(cfg.spec.omega_big0, 1.0);
        assert_eq!(cfg.tol, 1e-9);
        cfg.check().unwrap();
    }

    #[test]
    fn parse_error_has_position() {
        let err = ScenarioConfig::from_json("{\n  \"spec\": {\"gamma1\": 1.0,\n  }\n}").unwrap_err();
        match err {
            Error::Config(msg) => assert!(msg.contains("line 3"), "{msg}"),
            other => panic!("{other:?}"),
        }
        let err = ScenarioConfig::from_json(r#"{"spec": {"gamma1": 1, "gamma2": 0, "w1": 1, "w2": 0}, "colour": 1}"#)
            .unwrap_err();
        assert!(err.to_string().contains("colour"));
    }

    #[test]
    fn currents_need_bath_amplitudes() {
        let mut cfg = ScenarioConfig::minimal(ReservoirSpec::perfect_gap(10.0, 0.2, 1.0));
        cfg.outputs = vec![OutputKind::Currents];
        cfg.paths = vec![ComputationPath::PseudomodeOde];
        let err = cfg.check().unwrap_err();
        assert!(err.to_string().contains("currents"), "{err}");
        assert_eq!(err.exit_code(), 2);
        cfg.paths.push(ComputationPath::BathOracle);
        cfg.check().unwrap();
    }

    #[test]
    fn snapshot_times_must_be_on_grid() {
        let mut cfg = ScenarioConfig::minimal(ReservoirSpec::perfect_gap(10.0, 0.2, 1.0));
        cfg.t_steps = 101;
        cfg.snapshot_times = vec![10.0, 30.0];
        cfg.check().unwrap();
        assert_eq!(cfg.grid_index(30.0), Some(60));
        cfg.snapshot_times = vec![10.25];
        assert!(cfg.check().is_err());
    }

    #[test]
    fn omega0_units_need_unit_coupling() {
        let cfg = ScenarioConfig::minimal(ReservoirSpec::perfect_gap(10.0, 0.2, 2.0));
        assert!(cfg.check().is_err());
        let cfg = ScenarioConfig { units: Units::Absolute, ..cfg };
        cfg.check().unwrap();
    }

    #[test]
    fn eta_sweep_values() {
        let sweep = EtaSweep { min: 0.05, max: 10.0, points: 50, include: Some(vec![1.0]) };
        let v = sweep.values();
        assert_eq!(v.len(), 51);
        assert!((v[0] - 0.05).abs() < 1e-15 && (v[50] - 10.0).abs() < 1e-12);
        assert!(v.contains(&1.0));
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }
}
