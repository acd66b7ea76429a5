//! Scenario pipeline: run the requested computation paths and write the
//! requested observables.

use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;

use super::config::{ComputationPath, OutputKind, ScenarioConfig, Units};
use super::output::CsvSink;
use super::report::RunReport;
use crate::analytic::{trapping_limits_for_eta, AmplitudeState, ResonantGap};
use crate::dynamics::{build_bath_grid, integrate_bath, integrate_pseudomodes, BathGrid, BathState};
use crate::entanglement::{concurrences, density_atom_modes, density_modes_modes, entanglement_totals};
use crate::error::{Error, Result};
use crate::observables::{current, spectrum};
use crate::reservoir::ReservoirSpec;

/// Column labels carrying units.
struct Labels {
    time: &'static str,
    freq: &'static str,
    inv_freq: &'static str,
    inv_freq2: &'static str,
}

impl Labels {
    fn new(units: Units) -> Self {
        match units {
            Units::Omega0 => Labels {
                time: "1/Omega0",
                freq: "Omega0",
                inv_freq: "1/Omega0",
                inv_freq2: "1/Omega0^2",
            },
            Units::Absolute => Labels {
                time: "time",
                freq: "1/time",
                inv_freq: "time",
                inv_freq2: "time^2",
            },
        }
    }

    fn t(&self) -> String {
        format!("t [{}]", self.time)
    }

    fn delta(&self, name: &str) -> String {
        format!("{name} [{}]", self.freq)
    }
}

/// Run a scenario. The returned report always describes the run, with its
/// error section filled in on failure; `report.json` is written whenever the
/// output directory can be created.
pub fn run_scenario(config: &ScenarioConfig) -> RunReport {
    let start = Instant::now();
    let mut report = RunReport::new(config);
    let result = execute(config, &mut report);
    if let Err(e) = &result {
        report.record_error(e);
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    if std::fs::create_dir_all(&config.output_dir).is_ok() {
        if let Err(e) = report.write(&config.output_dir) {
            report.warnings.push(format!("could not write report.json: {e}"));
        }
    }
    report
}

struct Runs {
    analytic: Option<Vec<AmplitudeState>>,
    pseudomode: Option<Vec<AmplitudeState>>,
    bath: Option<(BathGrid, Vec<BathState>)>,
    reference: Option<Vec<BathState>>,
}

fn execute(config: &ScenarioConfig, report: &mut RunReport) -> Result<()> {
    config.check()?;
    let spec = config.spec;
    spec.ensure_valid()?;
    std::fs::create_dir_all(&config.output_dir)?;
    let times = config.times();
    let needs_bath = config
        .outputs
        .iter()
        .any(|o| matches!(o, OutputKind::Spectrum | OutputKind::Currents | OutputKind::Densities | OutputKind::Totals));

    let gap = if config.has_path(ComputationPath::Analytic) {
        Some(ResonantGap::new(&spec)?)
    } else {
        None
    };
    let mut runs = Runs {
        analytic: gap.map(|g| times.iter().map(|&t| g.amplitudes(t)).collect()),
        pseudomode: None,
        bath: None,
        reference: None,
    };
    if config.has_path(ComputationPath::PseudomodeOde) {
        runs.pseudomode = Some(integrate_pseudomodes(&spec, &times, config.tol)?);
    }

    if config.has_path(ComputationPath::BathOracle) || (needs_bath && gap.is_some()) {
        let grid = build_bath_grid(&spec, config.bath.n_modes, config.bath.cutoff)?;
        report.coverage = Some(grid.coverage);
        report.recurrence_horizon = grid.recurrence_horizon();
        if let Some(w) = &grid.warning {
            report.warnings.push(w.clone());
        }
        let states = if config.has_path(ComputationPath::BathOracle) {
            if config.t_max >= grid.recurrence_horizon() {
                report.beyond_recurrence = true;
                report.warnings.push(format!(
                    "t_max = {} reaches the recurrence horizon {:.4}; oracle results beyond it are not trustworthy",
                    config.t_max,
                    grid.recurrence_horizon()
                ));
            }
            report.notes.push("bath amplitudes from the discretized-bath oracle".into());
            integrate_bath(&spec, &grid, &times, config.tol)?
        } else {
            report.notes.push("bath amplitudes from the closed-form solution".into());
            let g = gap.expect("analytic path present");
            times.iter().map(|&t| closed_form_bath_state(&g, &grid, t)).collect()
        };
        if config.lorentzian_reference {
            let reference = ReservoirSpec {
                omega_c: spec.omega_c,
                omega_0: spec.omega_0,
                ..ReservoirSpec::single_lorentzian(spec.gamma1, spec.omega_big0)
            };
            let ref_grid = build_bath_grid(&reference, config.bath.n_modes, config.bath.cutoff)?;
            runs.reference = Some(integrate_bath(&reference, &ref_grid, &times, config.tol)?);
            report.notes.push(format!(
                "reference: single Lorentzian with gamma1 = {}, gamma2 = w2 = 0, w1 = 1",
                spec.gamma1
            ));
        }
        runs.bath = Some((grid, states));
    }

    let labels = Labels::new(config.units);
    let dir = config.output_dir.as_path();
    let mut files = Vec::new();
    for output in &config.outputs {
        match output {
            OutputKind::Populations => write_populations(dir, &labels, &runs, &mut files)?,
            OutputKind::Concurrences => write_concurrences(dir, &labels, &runs, &mut files)?,
            OutputKind::Spectrum => write_spectrum(dir, &labels, config, &runs, &mut files)?,
            OutputKind::Currents => write_currents(dir, &labels, config, &runs, &mut files)?,
            OutputKind::Densities => write_densities(dir, &labels, config, &runs, &mut files, &mut report.notes)?,
            OutputKind::Totals => write_totals(dir, &labels, &runs, &mut files)?,
            OutputKind::TrappingSweep => write_sweep(dir, config, &mut files, &mut report.notes)?,
        }
    }
    report.files = files;
    Ok(())
}

/// Bath state assembled from the closed-form mode amplitudes on a grid.
pub fn closed_form_bath_state(gap: &ResonantGap, grid: &BathGrid, t: f64) -> BathState {
    let omega_c = gap.spec().omega_c;
    BathState {
        t,
        c_a: gap.amplitudes(t).c_a,
        c_lambdas: grid
            .omegas
            .iter()
            .zip(&grid.couplings)
            .map(|(&w, &g)| if g == 0.0 { Complex64::new(0.0, 0.0) } else { g * gap.bath_amplitude_per_coupling(w - omega_c, t) })
            .collect(),
    }
}

fn push(files: &mut Vec<String>, sink: CsvSink) -> Result<()> {
    let path = sink.finish()?;
    files.push(path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default());
    Ok(())
}

fn write_amplitude_populations(dir: &Path, labels: &Labels, name: &str, states: &[AmplitudeState], files: &mut Vec<String>) -> Result<()> {
    let headers = vec![
        labels.t(),
        "abs_c_a_sq [1]".into(),
        "abs_a_1_sq [1]".into(),
        "abs_a_2_sq [1]".into(),
        "pi_j [1]".into(),
    ];
    let mut sink = CsvSink::create(dir, name, &headers)?;
    for s in states {
        let [p0, p1, p2, p3] = s.populations();
        sink.row(&[s.t, p0, p1, p2, p3])?;
    }
    push(files, sink)
}

fn write_populations(dir: &Path, labels: &Labels, runs: &Runs, files: &mut Vec<String>) -> Result<()> {
    match (&runs.analytic, &runs.pseudomode) {
        (Some(a), Some(p)) => {
            write_amplitude_populations(dir, labels, "populations.csv", a, files)?;
            write_amplitude_populations(dir, labels, "populations_pseudomode.csv", p, files)?;
        }
        (Some(a), None) => write_amplitude_populations(dir, labels, "populations.csv", a, files)?,
        (None, Some(p)) => write_amplitude_populations(dir, labels, "populations.csv", p, files)?,
        (None, None) => {}
    }
    if let Some((_, states)) = &runs.bath {
        let headers = vec![labels.t(), "abs_c_a_sq [1]".into(), "reservoir_population [1]".into(), "norm [1]".into()];
        let mut sink = CsvSink::create(dir, "populations_oracle.csv", &headers)?;
        for s in states {
            let reservoir: f64 = s.c_lambdas.iter().map(|c| c.norm_sqr()).sum();
            sink.row(&[s.t, s.c_a.norm_sqr(), reservoir, s.norm_sqr()])?;
        }
        push(files, sink)?;
    }
    Ok(())
}

fn write_concurrence_file(dir: &Path, labels: &Labels, name: &str, states: &[AmplitudeState], files: &mut Vec<String>) -> Result<()> {
    let headers = vec![
        labels.t(),
        "C_a1 [1]".into(),
        "C_a2 [1]".into(),
        "C_a12 [1]".into(),
        "C2_a1 [1]".into(),
        "C2_a2 [1]".into(),
        "C2_a12 [1]".into(),
        "tangle [1]".into(),
    ];
    let mut sink = CsvSink::create(dir, name, &headers)?;
    for s in states {
        let r = concurrences(s)?;
        sink.row(&[r.t, r.c2_a1.sqrt(), r.c2_a2.sqrt(), r.c2_a12.sqrt(), r.c2_a1, r.c2_a2, r.c2_a12, r.tangle])?;
    }
    push(files, sink)
}

fn write_concurrences(dir: &Path, labels: &Labels, runs: &Runs, files: &mut Vec<String>) -> Result<()> {
    match (&runs.analytic, &runs.pseudomode) {
        (Some(a), Some(p)) => {
            write_concurrence_file(dir, labels, "concurrences.csv", a, files)?;
            write_concurrence_file(dir, labels, "concurrences_pseudomode.csv", p, files)
        }
        (Some(a), None) => write_concurrence_file(dir, labels, "concurrences.csv", a, files),
        (None, Some(p)) => write_concurrence_file(dir, labels, "concurrences.csv", p, files),
        (None, None) => Ok(()),
    }
}

fn bath(runs: &Runs) -> Result<&(BathGrid, Vec<BathState>)> {
    runs.bath.as_ref().ok_or_else(|| Error::Structural("no bath amplitudes were computed".into()))
}

fn write_spectrum(dir: &Path, labels: &Labels, config: &ScenarioConfig, runs: &Runs, files: &mut Vec<String>) -> Result<()> {
    let (grid, states) = bath(runs)?;
    let window = grid.window(config.window);
    let headers = vec![labels.t(), labels.delta("delta"), format!("S [{}]", labels.inv_freq)];
    let mut sink = CsvSink::create(dir, "spectrum.csv", &headers)?;
    for state in states {
        let slice = spectrum(grid, state)?;
        for k in window.clone() {
            sink.row(&[state.t, grid.omegas[k] - grid.omega_c, slice.values[k]])?;
        }
    }
    push(files, sink)?;

    if config.snapshot_times.is_empty() {
        return Ok(());
    }
    let mut headers = vec![labels.delta("delta")];
    for &t in &config.snapshot_times {
        headers.push(format!("S(t={t}) [{}]", labels.inv_freq));
        if runs.reference.is_some() {
            headers.push(format!("S_lorentzian(t={t}) [{}]", labels.inv_freq));
        }
    }
    let mut columns = Vec::new();
    for &t in &config.snapshot_times {
        let idx = config.grid_index(t).expect("checked");
        columns.push(spectrum(grid, &states[idx])?.values);
        if let Some(reference) = &runs.reference {
            let rho = grid.density_of_modes();
            columns.push(reference[idx].c_lambdas.iter().map(|c| rho * c.norm_sqr()).collect());
        }
    }
    let mut sink = CsvSink::create(dir, "spectrum_snapshots.csv", &headers)?;
    for k in window {
        let mut row = vec![grid.omegas[k] - grid.omega_c];
        row.extend(columns.iter().map(|c| c[k]));
        sink.row(&row)?;
    }
    push(files, sink)
}

fn write_currents(dir: &Path, labels: &Labels, config: &ScenarioConfig, runs: &Runs, files: &mut Vec<String>) -> Result<()> {
    let (grid, states) = bath(runs)?;
    let window = grid.window(config.window);
    let headers = vec![labels.t(), labels.delta("delta"), "J [1]".into()];
    let mut sink = CsvSink::create(dir, "currents.csv", &headers)?;
    let mut net = CsvSink::create(
        dir,
        "net_current.csv",
        &[labels.t(), format!("Q [{}]", labels.freq), "abs_c_a_sq [1]".into()],
    )?;
    for state in states {
        let slice = current(grid, state, config.spec.omega_0)?;
        for k in window.clone() {
            sink.row(&[state.t, grid.omegas[k] - grid.omega_c, slice.j_values[k]])?;
        }
        net.row(&[state.t, slice.q, state.c_a.norm_sqr()])?;
    }
    push(files, sink)?;
    push(files, net)
}

fn write_densities(
    dir: &Path,
    labels: &Labels,
    config: &ScenarioConfig,
    runs: &Runs,
    files: &mut Vec<String>,
    notes: &mut Vec<String>,
) -> Result<()> {
    let (grid, states) = bath(runs)?;
    let window = grid.window(config.window);
    let headers = vec![labels.t(), labels.delta("delta"), format!("E_A [{}]", labels.inv_freq)];
    let mut sink = CsvSink::create(dir, "density_atom_modes.csv", &headers)?;
    for state in states {
        let slice = spectrum(grid, state)?;
        let e_a = density_atom_modes(state.c_a, &slice);
        for k in window.clone() {
            sink.row(&[state.t, grid.omegas[k] - grid.omega_c, e_a[k]])?;
        }
    }
    push(files, sink)?;

    if let Some(offset) = config.reference_mode_offset {
        let mu = grid.nearest(grid.omega_c + offset);
        let actual = grid.omegas[mu] - grid.omega_c;
        notes.push(format!("mode-mode row uses the grid mode at delta = {actual:.12e} (requested {offset})"));
        let headers = vec![labels.t(), labels.delta("delta_lambda"), format!("E_R [{}]", labels.inv_freq2)];
        let mut sink = CsvSink::create(dir, "density_modes_row.csv", &headers)?;
        for state in states {
            let slice = spectrum(grid, state)?;
            let s_mu = slice.values[mu];
            for k in window.clone() {
                sink.row(&[state.t, grid.omegas[k] - grid.omega_c, 2.0 * slice.values[k] * s_mu])?;
            }
        }
        push(files, sink)?;
    }

    if config.snapshot_times.is_empty() {
        return Ok(());
    }
    let headers = vec![
        labels.t(),
        labels.delta("delta_lambda"),
        labels.delta("delta_mu"),
        format!("E_R [{}]", labels.inv_freq2),
    ];
    let mut sink = CsvSink::create(dir, "density_modes_modes.csv", &headers)?;
    let m = window.len();
    for &t in &config.snapshot_times {
        let idx = config.grid_index(t).expect("checked");
        let state = &states[idx];
        let block = density_modes_modes(&spectrum(grid, state)?).block(window.clone());
        for (a, i) in window.clone().enumerate() {
            for (b, j) in window.clone().enumerate() {
                sink.row(&[state.t, grid.omegas[i] - grid.omega_c, grid.omegas[j] - grid.omega_c, block[a * m + b]])?;
            }
        }
    }
    push(files, sink)?;
    Ok(())
}

fn write_totals(dir: &Path, labels: &Labels, runs: &Runs, files: &mut Vec<String>) -> Result<()> {
    let (grid, states) = bath(runs)?;
    let headers = vec![labels.t(), "C2_A [1]".into(), "C2_R [1]".into(), "C2 [1]".into()];
    let mut sink = CsvSink::create(dir, "entanglement_totals.csv", &headers)?;
    for state in states {
        let totals = entanglement_totals(state.c_a, &spectrum(grid, state)?);
        sink.row(&[state.t, totals.c2_a_total, totals.c2_r_total, totals.c2_total])?;
    }
    push(files, sink)
}

fn write_sweep(dir: &Path, config: &ScenarioConfig, files: &mut Vec<String>, notes: &mut Vec<String>) -> Result<()> {
    let sweep = config.eta_sweep.as_ref().expect("checked");
    notes.push(format!(
        "eta sweep: {} log-spaced points on [{}, {}] plus {:?}",
        sweep.points,
        sweep.min,
        sweep.max,
        sweep.include.clone().unwrap_or_default()
    ));
    let headers: Vec<String> = ["eta [1]", "abs_c_a_inf_sq [1]", "abs_a_1_inf_sq [1]", "pi_j_inf [1]"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut sink = CsvSink::create(dir, "trapping_sweep.csv", &headers)?;
    for eta in sweep.values() {
        let l = trapping_limits_for_eta(eta);
        sink.row(&[eta, l.c_a_inf * l.c_a_inf, l.a_1_inf * l.a_1_inf, l.pi_j_inf])?;
    }
    push(files, sink)
}
