//! Numerical routes: the two-pseudomode amplitude equations and the
//! discretized-bath Schrödinger equation.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::analytic::AmplitudeState;
use crate::error::{Error, Result};
use crate::ode::{Dopri5, OdeSystem};
use crate::reservoir::{DerivedConstants, ReservoirSpec};

/// Coverage ratio below which a grid carries a truncation warning.
pub const COVERAGE_WARNING_BELOW: f64 = 0.99;

/// Atom plus two damped pseudomodes in the frame rotating at `omega_c`.
/// The fourth component accumulates the vacuum population.
struct PseudomodeSystem {
    detuning: f64,
    coupling: f64,
    consts: DerivedConstants,
}

impl OdeSystem for PseudomodeSystem {
    fn dim(&self) -> usize {
        4
    }

    fn rhs(&self, _t: f64, y: &[Complex64], dy: &mut [Complex64]) {
        let i = Complex64::i();
        let (c_a, a_1, a_2) = (y[0], y[1], y[2]);
        let k = &self.consts;
        dy[0] = -i * (self.detuning * c_a + self.coupling * a_2);
        dy[1] = -0.5 * k.gamma_p1 * a_1 - i * k.v * a_2;
        dy[2] = -0.5 * k.gamma_p2 * a_2 - i * (self.coupling * c_a + k.v * a_1);
        dy[3] = Complex64::new(k.gamma_p1 * a_1.norm_sqr() + k.gamma_p2 * a_2.norm_sqr(), 0.0);
    }
}

fn check_time_grid(t_grid: &[f64], tol: f64) -> Result<()> {
    match t_grid.first() {
        None => return Err(Error::Argument("empty time grid".into())),
        Some(&t0) if t0 != 0.0 => return Err(Error::Argument(format!("time grid must start at 0, starts at {t0}"))),
        _ => {}
    }
    if !(tol > 0.0) {
        return Err(Error::Argument(format!("tolerance must be > 0, got {tol}")));
    }
    Ok(())
}

/// Integrate the pseudomode amplitude equations from an excited atom and
/// empty pseudomodes. Any valid spec is accepted: imperfect gaps and detuning
/// included.
pub fn integrate_pseudomodes(spec: &ReservoirSpec, t_grid: &[f64], tol: f64) -> Result<Vec<AmplitudeState>> {
    check_time_grid(t_grid, tol)?;
    let consts = spec.derive_constants()?;
    let sys = PseudomodeSystem {
        detuning: spec.omega_0 - spec.omega_c,
        coupling: spec.omega_big0,
        consts,
    };
    let y0 = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
    ];
    let mut out = Vec::with_capacity(t_grid.len());
    Dopri5::new(tol).integrate(&sys, &y0, t_grid, |t, y| {
        out.push(AmplitudeState { t, c_a: y[0], a_1: y[1], a_2: y[2], pi_j: y[3].re });
    })?;
    Ok(out)
}

/// Uniform discretization of the reservoir on `[omega_c - cutoff, omega_c + cutoff]`,
/// endpoints included.
///
/// Each mode stands for a frequency cell of width `delta_omega`, so its coupling
/// is `g = omega_big0 * sqrt(D(omega) * delta_omega / 2pi)` and the density of
/// modes is `1 / delta_omega`.
#[derive(Debug, Clone, Serialize)]
pub struct BathGrid {
    pub omegas: Vec<f64>,
    pub couplings: Vec<f64>,
    pub delta_omega: f64,
    pub cutoff: f64,
    pub omega_c: f64,
    /// `sum g^2 / omega_big0^2`: fraction of the total coupling captured.
    pub coverage: f64,
    pub warning: Option<String>,
}

impl BathGrid {
    pub fn n_modes(&self) -> usize {
        self.omegas.len()
    }

    pub fn density_of_modes(&self) -> f64 {
        1.0 / self.delta_omega
    }

    /// Time after which the discrete bath refeeds the atom.
    pub fn recurrence_horizon(&self) -> f64 {
        2.0 * PI / self.delta_omega
    }

    /// Index of the mode closest to `omega`.
    pub fn nearest(&self, omega: f64) -> usize {
        let x = (omega - self.omegas[0]) / self.delta_omega;
        (x.round().max(0.0) as usize).min(self.n_modes() - 1)
    }

    /// Indices of the modes with `|omega - omega_c| <= half_width`.
    pub fn window(&self, half_width: f64) -> std::ops::Range<usize> {
        let tol = 1e-9 * self.delta_omega;
        let lo = self.omegas.partition_point(|&w| w < self.omega_c - half_width - tol);
        let hi = self.omegas.partition_point(|&w| w <= self.omega_c + half_width + tol);
        lo..hi
    }

    /// Trapezoidal weights for quadrature over the grid.
    pub fn trapezoid_weight(&self, index: usize) -> f64 {
        if index == 0 || index + 1 == self.n_modes() {
            0.5 * self.delta_omega
        } else {
            self.delta_omega
        }
    }
}

pub fn build_bath_grid(spec: &ReservoirSpec, n_modes: usize, cutoff: f64) -> Result<BathGrid> {
    spec.ensure_valid()?;
    if n_modes < 2 {
        return Err(Error::Argument(format!("need at least 2 modes, got {n_modes}")));
    }
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(Error::Argument(format!("cutoff must be finite and > 0, got {cutoff}")));
    }
    let delta_omega = 2.0 * cutoff / (n_modes - 1) as f64;
    let omegas: Vec<f64> = (0..n_modes)
        .map(|k| {
            // Index symmetric about the centre so the grid is exactly mirror-symmetric.
            let offset = k as f64 - 0.5 * (n_modes - 1) as f64;
            spec.omega_c + offset * delta_omega
        })
        .collect();
    let weights: Vec<f64> = omegas
        .iter()
        .map(|&w| spec.structure_function_unchecked(w) * delta_omega / (2.0 * PI))
        .collect();
    let coverage: f64 = weights.iter().sum();
    let couplings = weights.iter().map(|&x| spec.omega_big0 * x.sqrt()).collect();
    let warning = (coverage < COVERAGE_WARNING_BELOW).then(|| {
        format!(
            "grid captures {:.4} of the total coupling (cutoff {cutoff}); far-detuned modes are truncated",
            coverage
        )
    });
    Ok(BathGrid { omegas, couplings, delta_omega, cutoff, omega_c: spec.omega_c, coverage, warning })
}

/// Interaction-picture amplitudes of the atom and every bath mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BathState {
    pub t: f64,
    pub c_a: Complex64,
    pub c_lambdas: Vec<Complex64>,
}

impl BathState {
    pub fn norm_sqr(&self) -> f64 {
        self.c_a.norm_sqr() + self.c_lambdas.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }
}

/// `i dc_a/dt = sum g e^{-i d t} c_l`, `i dc_l/dt = g e^{i d t} c_a` with
/// `d = omega_l - omega_0`.
struct BathSystem<'a> {
    detunings: Vec<f64>,
    couplings: &'a [f64],
}

impl OdeSystem for BathSystem<'_> {
    fn dim(&self) -> usize {
        self.couplings.len() + 1
    }

    fn rhs(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]) {
        let c_a = y[0];
        let mut feed = Complex64::new(0.0, 0.0);
        for (k, (&d, &g)) in self.detunings.iter().zip(self.couplings).enumerate() {
            let (s, c) = (d * t).sin_cos();
            let phase = Complex64::new(c, s);
            feed += g * phase.conj() * y[k + 1];
            // -i * g * e^{i d t} * c_a
            let z = g * phase * c_a;
            dy[k + 1] = Complex64::new(z.im, -z.re);
        }
        dy[0] = Complex64::new(feed.im, -feed.re);
    }
}

/// Integrate the discretized bath from an excited atom and an empty reservoir,
/// handing each grid-time state to `observe`.
pub fn integrate_bath_with<F>(spec: &ReservoirSpec, grid: &BathGrid, t_grid: &[f64], tol: f64, mut observe: F) -> Result<()>
where
    F: FnMut(BathState),
{
    check_time_grid(t_grid, tol)?;
    spec.ensure_valid()?;
    if grid.couplings.len() != grid.omegas.len() {
        return Err(Error::Structural("grid couplings and frequencies differ in length".into()));
    }
    let sys = BathSystem {
        detunings: grid.omegas.iter().map(|&w| w - spec.omega_0).collect(),
        couplings: &grid.couplings,
    };
    let mut y0 = vec![Complex64::new(0.0, 0.0); grid.n_modes() + 1];
    y0[0] = Complex64::new(1.0, 0.0);
    Dopri5::new(tol).integrate(&sys, &y0, t_grid, |t, y| {
        observe(BathState { t, c_a: y[0], c_lambdas: y[1..].to_vec() });
    })?;
    Ok(())
}

pub fn integrate_bath(spec: &ReservoirSpec, grid: &BathGrid, t_grid: &[f64], tol: f64) -> Result<Vec<BathState>> {
    let mut out = Vec::with_capacity(t_grid.len());
    integrate_bath_with(spec, grid, t_grid, tol, |s| out.push(s))?;
    Ok(out)
}

/// `n` equally spaced times on `[0, t_max]`, endpoints included.
pub fn uniform_times(t_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::ResonantGap;
    use crate::reservoir::coupling_coverage;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fig1() -> ReservoirSpec {
        ReservoirSpec::perfect_gap(10.0, 0.2, 1.0)
    }

    #[test]
    fn pseudomodes_match_closed_form() {
        let spec = fig1();
        let tol = 1e-9;
        let times = uniform_times(50.0, 501);
        let gap = ResonantGap::new(&spec).unwrap();
        let states = integrate_pseudomodes(&spec, &times, tol).unwrap();
        let worst = states
            .iter()
            .map(|s| (s.c_a - gap.amplitudes(s.t).c_a).norm())
            .fold(0.0, f64::max);
        assert!(worst <= 10.0 * tol, "max deviation {worst}");
    }

    #[test]
    fn decoupled_atom_stays_excited() {
        let spec = ReservoirSpec { omega_big0: 0.0, ..fig1() };
        let states = integrate_pseudomodes(&spec, &uniform_times(20.0, 41), 1e-10).unwrap();
        for s in states {
            assert_eq!(s.c_a, Complex64::new(1.0, 0.0));
            assert_eq!(s.pi_j, 0.0);
        }
    }

    #[test]
    fn first_pseudomode_idle_without_inter_mode_coupling() {
        let spec = ReservoirSpec {
            gamma1: 1.0,
            gamma2: 1.0,
            w1: 2.0,
            w2: 1.0,
            omega_c: 0.0,
            omega_0: 0.0,
            omega_big0: 1.0,
        };
        let states = integrate_pseudomodes(&spec, &uniform_times(30.0, 61), 1e-9).unwrap();
        for s in &states {
            assert_eq!(s.a_1, Complex64::new(0.0, 0.0));
            assert!((s.trace() - 1.0).abs() < 1e-7);
        }
        assert!(states.last().unwrap().c_a.norm() < 0.5);
    }

    #[test]
    fn time_grid_must_start_at_zero() {
        assert!(integrate_pseudomodes(&fig1(), &[1.0, 2.0], 1e-8).is_err());
        assert!(integrate_pseudomodes(&fig1(), &[0.0, 2.0], 0.0).is_err());
    }

    #[test]
    fn grid_layout() {
        let spec = fig1();
        let grid = build_bath_grid(&spec, 4001, 40.0).unwrap();
        assert_eq!(grid.n_modes(), 4001);
        assert_eq!(grid.omegas[2000], 0.0);
        assert_eq!(grid.couplings[2000], 0.0);
        assert_relative_eq!(grid.delta_omega, 0.02, max_relative = 1e-14);
        assert!(grid.couplings.iter().all(|&g| g >= 0.0 && g.is_finite()));
        assert_eq!(grid.window(5.0).len(), 501);

        let tiny = build_bath_grid(&spec, 2, 3.0).unwrap();
        assert_eq!(tiny.omegas, vec![-3.0, 3.0]);
        assert!(build_bath_grid(&spec, 1, 3.0).is_err());
        assert!(build_bath_grid(&spec, 10, -1.0).is_err());
    }

    #[test]
    fn coverage_tracks_closed_form_window_integral() {
        // Truncation at 40 omega_big0 loses the slow 1/omega^2 tails of the
        // broad Lorentzian: about 8% of the coupling.
        let spec = fig1();
        let grid = build_bath_grid(&spec, 4000, 40.0).unwrap();
        let exact = coupling_coverage(&spec, 40.0);
        assert_relative_eq!(exact, 0.919_26, max_relative = 1e-4);
        assert!((grid.coverage - exact).abs() < 1e-4);
        assert!(grid.warning.is_some());

        let wide = build_bath_grid(&spec, 40_000, 4000.0).unwrap();
        assert!(wide.coverage > 0.99);
        assert!(wide.warning.is_none());
    }

    #[test]
    fn bath_initial_norm_is_exact_and_drift_small() {
        let spec = fig1();
        let grid = build_bath_grid(&spec, 1000, 20.0).unwrap();
        let states = integrate_bath(&spec, &grid, &uniform_times(20.0, 41), 1e-9).unwrap();
        assert_eq!(states[0].norm_sqr(), 1.0);
        for s in &states {
            assert!((s.norm_sqr() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn bath_and_pseudomodes_agree_for_imperfect_gap_with_detuning() {
        let spec = ReservoirSpec {
            gamma1: 1.0,
            gamma2: 0.5,
            w1: 1.5,
            w2: 0.5,
            omega_c: 0.0,
            omega_0: 0.3,
            omega_big0: 1.0,
        };
        assert!(!spec.is_perfect_gap());
        let times = uniform_times(20.0, 81);
        let grid = build_bath_grid(&spec, 4001, 60.0).unwrap();
        let oracle = integrate_bath(&spec, &grid, &times, 1e-9).unwrap();
        let pm = integrate_pseudomodes(&spec, &times, 1e-10).unwrap();
        let worst = oracle
            .iter()
            .zip(&pm)
            .map(|(o, p)| (o.c_a.norm_sqr() - p.c_a.norm_sqr()).abs())
            .fold(0.0, f64::max);
        assert!(worst < 5e-3, "max |c_a|^2 deviation {worst}");
    }

    #[test]
    fn bath_with_single_lorentzian() {
        // Weak coupling to a broad Lorentzian decays close to exponentially.
        let spec = ReservoirSpec::single_lorentzian(10.0, 1.0);
        let times = uniform_times(5.0, 11);
        let grid = build_bath_grid(&spec, 4001, 200.0).unwrap();
        let oracle = integrate_bath(&spec, &grid, &times, 1e-9).unwrap();
        let pm = integrate_pseudomodes(&spec, &times, 1e-10).unwrap();
        for (o, p) in oracle.iter().zip(&pm) {
            assert!((o.c_a.norm_sqr() - p.c_a.norm_sqr()).abs() < 5e-3);
        }
    }

    fn any_valid_spec() -> impl Strategy<Value = ReservoirSpec> {
        (0.1f64..10.0, 0.0f64..1.0, 0.0f64..2.0, 0.2f64..3.0, -1.0f64..1.0).prop_map(
            |(g1, ratio, excess, o0, detuning)| {
                // w2 * g1 <= w1 * g2 keeps the structure function nonnegative.
                let g2 = g1 * ratio;
                let w2_max = if g1 > g2 { g2 / (g1 - g2) } else { excess };
                let w2 = w2_max * (1.0 - 0.5 * excess / 2.0);
                ReservoirSpec {
                    gamma1: g1,
                    gamma2: g2,
                    w1: 1.0 + w2,
                    w2,
                    omega_c: 0.0,
                    omega_0: detuning,
                    omega_big0: o0,
                }
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10))]

        #[test]
        fn pseudomode_trace_preserved(spec in any_valid_spec()) {
            prop_assume!(spec.validate().is_valid());
            let states = integrate_pseudomodes(&spec, &uniform_times(50.0, 101), 1e-9).unwrap();
            for s in &states {
                prop_assert!((s.trace() - 1.0).abs() < 1e-7, "trace {}", s.trace());
            }
        }
    }
}
