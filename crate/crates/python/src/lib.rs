//! Python bindings: `import gapsim`.

use std::path::PathBuf;

use gapsim::analytic::{self, trapping_limits_for_eta};
use gapsim::cli::{self, Overrides};
use gapsim::{dynamics, entanglement, observables, Complex64, Error};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

create_exception!(gapsim, GapsimError, PyException, "Base class of every gapsim failure.");
create_exception!(gapsim, ConfigError, GapsimError, "Invalid parameters or configuration.");
create_exception!(gapsim, NumericError, GapsimError, "Integration or invariant failure.");
create_exception!(gapsim, PreconditionError, GapsimError, "A closed form was requested outside its validity.");

fn to_py(err: Error) -> PyErr {
    let msg = err.to_string();
    match err.exit_code() {
        2 => ConfigError::new_err(msg),
        4 => PreconditionError::new_err(msg),
        _ => NumericError::new_err(msg),
    }
}

/// Serialize through JSON into plain Python objects.
fn json_to_py<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| NumericError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

#[pyclass(name = "ReservoirSpec", module = "gapsim", frozen)]
pub struct PyReservoirSpec {
    pub inner: gapsim::ReservoirSpec,
}

#[pymethods]
impl PyReservoirSpec {
    #[new]
    #[pyo3(signature = (gamma1, gamma2, w1, w2, omega_c = 0.0, omega_0 = 0.0, omega_big0 = 1.0))]
    fn new(gamma1: f64, gamma2: f64, w1: f64, w2: f64, omega_c: f64, omega_0: f64, omega_big0: f64) -> Self {
        PyReservoirSpec {
            inner: gapsim::ReservoirSpec { gamma1, gamma2, w1, w2, omega_c, omega_0, omega_big0 },
        }
    }

    /// Weights chosen so the structure function vanishes at the centre.
    #[staticmethod]
    #[pyo3(signature = (gamma1, gamma2, omega_big0 = 1.0))]
    fn perfect_gap(gamma1: f64, gamma2: f64, omega_big0: f64) -> Self {
        PyReservoirSpec { inner: gapsim::ReservoirSpec::perfect_gap(gamma1, gamma2, omega_big0) }
    }

    #[staticmethod]
    #[pyo3(signature = (gamma1, omega_big0 = 1.0))]
    fn single_lorentzian(gamma1: f64, omega_big0: f64) -> Self {
        PyReservoirSpec { inner: gapsim::ReservoirSpec::single_lorentzian(gamma1, omega_big0) }
    }

    #[getter]
    fn gamma1(&self) -> f64 {
        self.inner.gamma1
    }
    #[getter]
    fn gamma2(&self) -> f64 {
        self.inner.gamma2
    }
    #[getter]
    fn w1(&self) -> f64 {
        self.inner.w1
    }
    #[getter]
    fn w2(&self) -> f64 {
        self.inner.w2
    }
    #[getter]
    fn omega_c(&self) -> f64 {
        self.inner.omega_c
    }
    #[getter]
    fn omega_0(&self) -> f64 {
        self.inner.omega_0
    }
    #[getter]
    fn omega_big0(&self) -> f64 {
        self.inner.omega_big0
    }

    fn is_perfect_gap(&self) -> bool {
        self.inner.is_perfect_gap()
    }

    fn is_resonant(&self) -> bool {
        self.inner.is_resonant()
    }

    /// Validation report as a dict; never raises.
    fn validate(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        json_to_py(py, &self.inner.validate())
    }

    fn derive_constants(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let constants = self.inner.derive_constants().map_err(to_py)?;
        json_to_py(py, &constants)
    }

    fn structure_function(&self, omega: f64) -> PyResult<f64> {
        self.inner.structure_function(omega).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        let s = &self.inner;
        format!(
            "ReservoirSpec(gamma1={}, gamma2={}, w1={}, w2={}, omega_c={}, omega_0={}, omega_big0={})",
            s.gamma1, s.gamma2, s.w1, s.w2, s.omega_c, s.omega_0, s.omega_big0
        )
    }
}

#[pyclass(name = "AmplitudeState", module = "gapsim", frozen)]
pub struct PyAmplitudeState {
    pub inner: gapsim::AmplitudeState,
}

#[pymethods]
impl PyAmplitudeState {
    #[getter]
    fn t(&self) -> f64 {
        self.inner.t
    }
    #[getter]
    fn c_a(&self) -> Complex64 {
        self.inner.c_a
    }
    #[getter]
    fn a_1(&self) -> Complex64 {
        self.inner.a_1
    }
    #[getter]
    fn a_2(&self) -> Complex64 {
        self.inner.a_2
    }
    #[getter]
    fn pi_j(&self) -> f64 {
        self.inner.pi_j
    }

    /// `(|c_a|^2, |a_1|^2, |a_2|^2, pi_j)`
    fn populations(&self) -> (f64, f64, f64, f64) {
        let [a, b, c, d] = self.inner.populations();
        (a, b, c, d)
    }

    fn trace(&self) -> f64 {
        self.inner.trace()
    }

    fn __repr__(&self) -> String {
        let s = &self.inner;
        format!("AmplitudeState(t={}, c_a={}, a_1={}, a_2={}, pi_j={})", s.t, s.c_a, s.a_1, s.a_2, s.pi_j)
    }
}

#[pyclass(name = "ResonantGap", module = "gapsim", frozen)]
pub struct PyResonantGap {
    inner: analytic::ResonantGap,
}

#[pymethods]
impl PyResonantGap {
    #[new]
    fn new(spec: &PyReservoirSpec) -> PyResult<Self> {
        Ok(PyResonantGap { inner: analytic::ResonantGap::new(&spec.inner).map_err(to_py)? })
    }

    #[getter]
    fn eta(&self) -> f64 {
        self.inner.eta()
    }
    #[getter]
    fn big_gamma(&self) -> f64 {
        self.inner.big_gamma()
    }
    #[getter]
    fn big_omega(&self) -> Complex64 {
        self.inner.big_omega()
    }

    fn amplitudes(&self, t: f64) -> PyAmplitudeState {
        PyAmplitudeState { inner: self.inner.amplitudes(t) }
    }

    fn bath_amplitude_per_coupling(&self, delta: f64, t: f64) -> Complex64 {
        self.inner.bath_amplitude_per_coupling(delta, t)
    }

    fn spectrum(&self, omega: f64, t: f64) -> f64 {
        self.inner.spectrum(omega, t)
    }

    fn spectrum_longtime(&self, omega: f64, t: f64) -> PyResult<f64> {
        self.inner.spectrum_longtime(omega, t).map_err(to_py)
    }

    fn current(&self, omega: f64, t: f64) -> f64 {
        self.inner.current(omega, t)
    }
}

#[pyclass(name = "BathGrid", module = "gapsim", frozen)]
pub struct PyBathGrid {
    inner: dynamics::BathGrid,
}

#[pymethods]
impl PyBathGrid {
    #[new]
    #[pyo3(signature = (spec, n_modes = 4000, cutoff = 40.0))]
    fn new(spec: &PyReservoirSpec, n_modes: usize, cutoff: f64) -> PyResult<Self> {
        Ok(PyBathGrid { inner: dynamics::build_bath_grid(&spec.inner, n_modes, cutoff).map_err(to_py)? })
    }

    #[getter]
    fn omegas(&self) -> Vec<f64> {
        self.inner.omegas.clone()
    }
    #[getter]
    fn couplings(&self) -> Vec<f64> {
        self.inner.couplings.clone()
    }
    #[getter]
    fn delta_omega(&self) -> f64 {
        self.inner.delta_omega
    }
    #[getter]
    fn coverage(&self) -> f64 {
        self.inner.coverage
    }
    #[getter]
    fn warning(&self) -> Option<String> {
        self.inner.warning.clone()
    }

    fn recurrence_horizon(&self) -> f64 {
        self.inner.recurrence_horizon()
    }

    fn __len__(&self) -> usize {
        self.inner.n_modes()
    }
}

#[pyclass(name = "BathState", module = "gapsim", frozen)]
pub struct PyBathState {
    inner: dynamics::BathState,
}

#[pymethods]
impl PyBathState {
    #[getter]
    fn t(&self) -> f64 {
        self.inner.t
    }
    #[getter]
    fn c_a(&self) -> Complex64 {
        self.inner.c_a
    }
    #[getter]
    fn c_lambdas(&self) -> Vec<Complex64> {
        self.inner.c_lambdas.clone()
    }

    fn norm_sqr(&self) -> f64 {
        self.inner.norm_sqr()
    }
}

#[pyfunction]
fn trapping_limits(py: Python<'_>, spec: &PyReservoirSpec) -> PyResult<Py<PyAny>> {
    let limits = analytic::trapping_limits(&spec.inner).map_err(to_py)?;
    json_to_py(py, &limits)
}

#[pyfunction]
#[pyo3(name = "trapping_limits_for_eta")]
fn limits_for_eta(py: Python<'_>, eta: f64) -> PyResult<Py<PyAny>> {
    json_to_py(py, &trapping_limits_for_eta(eta))
}

#[pyfunction]
#[pyo3(signature = (spec, times, tol = 1e-9))]
fn integrate_pseudomodes(py: Python<'_>, spec: &PyReservoirSpec, times: Vec<f64>, tol: f64) -> PyResult<Vec<PyAmplitudeState>> {
    let states = py.detach(|| dynamics::integrate_pseudomodes(&spec.inner, &times, tol)).map_err(to_py)?;
    Ok(states.into_iter().map(|inner| PyAmplitudeState { inner }).collect())
}

#[pyfunction]
#[pyo3(signature = (spec, grid, times, tol = 1e-9))]
fn integrate_bath(
    py: Python<'_>,
    spec: &PyReservoirSpec,
    grid: &PyBathGrid,
    times: Vec<f64>,
    tol: f64,
) -> PyResult<Vec<PyBathState>> {
    let states = py.detach(|| dynamics::integrate_bath(&spec.inner, &grid.inner, &times, tol)).map_err(to_py)?;
    Ok(states.into_iter().map(|inner| PyBathState { inner }).collect())
}

/// Reservoir spectrum on every grid mode.
#[pyfunction]
fn spectrum(grid: &PyBathGrid, state: &PyBathState) -> PyResult<Vec<f64>> {
    Ok(observables::spectrum(&grid.inner, &state.inner).map_err(to_py)?.values)
}

/// Mode currents and their integral `Q`.
#[pyfunction]
fn current(grid: &PyBathGrid, state: &PyBathState, omega_0: f64) -> PyResult<(Vec<f64>, f64)> {
    let slice = observables::current(&grid.inner, &state.inner, omega_0).map_err(to_py)?;
    Ok((slice.j_values, slice.q))
}

#[pyfunction]
fn concurrences(py: Python<'_>, state: &PyAmplitudeState) -> PyResult<Py<PyAny>> {
    json_to_py(py, &entanglement::concurrences(&state.inner).map_err(to_py)?)
}

#[pyfunction]
fn entanglement_totals(py: Python<'_>, grid: &PyBathGrid, state: &PyBathState) -> PyResult<Py<PyAny>> {
    let slice = observables::spectrum(&grid.inner, &state.inner).map_err(to_py)?;
    json_to_py(py, &entanglement::entanglement_totals(state.inner.c_a, &slice))
}

fn overrides(out_dir: Option<PathBuf>, tol: Option<f64>, modes: Option<usize>, cutoff: Option<f64>, t_max: Option<f64>) -> Overrides {
    Overrides { out_dir, tol, modes, cutoff, t_max }
}

fn finish(py: Python<'_>, report: cli::RunReport) -> PyResult<Py<PyAny>> {
    match &report.error {
        None => json_to_py(py, &report),
        Some(e) => Err(match e.exit_code {
            2 => ConfigError::new_err(e.message.clone()),
            4 => PreconditionError::new_err(e.message.clone()),
            _ => NumericError::new_err(e.message.clone()),
        }),
    }
}

/// Run a figure preset and return its report as a dict.
#[pyfunction]
#[pyo3(signature = (name, out_dir = None, tol = None, modes = None, cutoff = None, t_max = None))]
fn run_preset(
    py: Python<'_>,
    name: &str,
    out_dir: Option<PathBuf>,
    tol: Option<f64>,
    modes: Option<usize>,
    cutoff: Option<f64>,
    t_max: Option<f64>,
) -> PyResult<Py<PyAny>> {
    let o = overrides(out_dir, tol, modes, cutoff, t_max);
    let report = py.detach(|| cli::run_preset(name, &o)).map_err(to_py)?;
    finish(py, report)
}

/// Run a JSON scenario config and return its report as a dict.
#[pyfunction]
#[pyo3(signature = (path, out_dir = None, tol = None, modes = None, cutoff = None, t_max = None))]
fn run_config(
    py: Python<'_>,
    path: PathBuf,
    out_dir: Option<PathBuf>,
    tol: Option<f64>,
    modes: Option<usize>,
    cutoff: Option<f64>,
    t_max: Option<f64>,
) -> PyResult<Py<PyAny>> {
    let o = overrides(out_dir, tol, modes, cutoff, t_max);
    let report = py.detach(|| cli::run_config(&path, &o)).map_err(to_py)?;
    finish(py, report)
}

#[pymodule]
#[pyo3(name = "gapsim")]
pub fn gapsim_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("GapsimError", py.get_type::<GapsimError>())?;
    m.add("ConfigError", py.get_type::<ConfigError>())?;
    m.add("NumericError", py.get_type::<NumericError>())?;
    m.add("PreconditionError", py.get_type::<PreconditionError>())?;
    m.add("PRESETS", cli::PRESET_NAMES.to_vec())?;
    m.add_class::<PyReservoirSpec>()?;
    m.add_class::<PyAmplitudeState>()?;
    m.add_class::<PyResonantGap>()?;
    m.add_class::<PyBathGrid>()?;
    m.add_class::<PyBathState>()?;
    m.add_function(wrap_pyfunction!(trapping_limits, m)?)?;
    m.add_function(wrap_pyfunction!(limits_for_eta, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_pseudomodes, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_bath, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(current, m)?)?;
    m.add_function(wrap_pyfunction!(concurrences, m)?)?;
    m.add_function(wrap_pyfunction!(entanglement_totals, m)?)?;
    m.add_function(wrap_pyfunction!(run_preset, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
