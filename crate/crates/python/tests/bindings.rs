use std::ffi::CString;

use pyo3::prelude::*;
use pyo3::types::PyDict;

fn run(script: &str) {
    Python::attach(|py| {
        let module = PyModule::new(py, "gapsim").unwrap();
        gapsim_py::gapsim_module(&module).unwrap();
        let globals = PyDict::new(py);
        globals.set_item("gapsim", module).unwrap();
        let code = CString::new(script).unwrap();
        if let Err(e) = py.run(&code, Some(&globals), None) {
            e.print(py);
            panic!("python snippet failed");
        }
    });
}

#[test]
fn spec_and_constants() {
    run(r#"
spec = gapsim.ReservoirSpec.perfect_gap(10.0, 0.2)
assert spec.is_perfect_gap() and spec.is_resonant()
report = spec.validate()
assert report["violations"] == [] and report["perfect_gap"]
c = spec.derive_constants()
assert abs(c["big_gamma"] - 2.55) < 1e-14
assert abs(c["eta"] - 2 ** 0.5) < 1e-14
assert spec.structure_function(0.0) == 0.0
assert "gamma1=10" in repr(spec)
"#);
}

#[test]
fn errors_map_to_exception_classes() {
    run(r#"
bad = gapsim.ReservoirSpec(1.0, 0.5, 1.0, 0.5)
assert bad.validate()["violations"]
try:
    bad.derive_constants()
except gapsim.ConfigError as e:
    assert isinstance(e, gapsim.GapsimError)
else:
    raise AssertionError("expected ConfigError")
try:
    gapsim.ResonantGap(gapsim.ReservoirSpec.single_lorentzian(1.0))
except gapsim.PreconditionError:
    pass
else:
    raise AssertionError("expected PreconditionError")
try:
    gapsim.run_preset("nope")
except gapsim.ConfigError as e:
    assert "fig1a" in str(e)
"#);
}

#[test]
fn closed_forms_and_integrators_agree() {
    run(r#"
spec = gapsim.ReservoirSpec.perfect_gap(10.0, 0.2)
gap = gapsim.ResonantGap(spec)
late = gap.amplitudes(50.0)
p = late.populations()
assert abs(p[0] - 1 / 9) < 1e-6 and abs(p[3] - 2 / 3) < 1e-6
assert abs(late.trace() - 1) < 1e-12
lim = gapsim.trapping_limits(spec)
assert abs(lim["pi_j_inf"] - 2 / 3) < 1e-12
assert gapsim.trapping_limits_for_eta(1.0)["c_a_inf"] == 0.5
states = gapsim.integrate_pseudomodes(spec, [0.0, 1.0, 5.0])
for s in states:
    assert abs(s.c_a - gap.amplitudes(s.t).c_a) < 1e-7
rec = gapsim.concurrences(states[-1])
assert abs(rec["c2_a12"] - rec["c2_a1"] - rec["c2_a2"]) < 1e-12
"#);
}

#[test]
fn bath_observables() {
    run(r#"
spec = gapsim.ReservoirSpec.perfect_gap(10.0, 0.2)
grid = gapsim.BathGrid(spec, 801, 20.0)
assert len(grid) == 801 and len(grid.omegas) == 801
assert grid.recurrence_horizon() > 10.0
states = gapsim.integrate_bath(spec, grid, [0.0, 5.0])
late = states[-1]
assert abs(late.norm_sqr() - 1) < 1e-6
s = gapsim.spectrum(grid, late)
assert len(s) == 801 and min(s) >= 0.0
j, q = gapsim.current(grid, late, 0.0)
assert len(j) == 801
t = gapsim.entanglement_totals(grid, late)
assert abs(t["c2_total"] - t["c2_a_total"] - t["c2_r_total"]) < 1e-12
"#);
}

#[test]
fn preset_run_returns_report() {
    let dir = std::env::temp_dir().join(format!("gapsim-py-{}", std::process::id()));
    run(&format!(
        r#"
report = gapsim.run_preset("fig1b", out_dir={dir:?})
assert report["error"] is None
assert "trapping_sweep.csv" in report["files"]
assert "fig7" in gapsim.PRESETS
"#
    ));
    std::fs::remove_dir_all(dir).ok();
}
