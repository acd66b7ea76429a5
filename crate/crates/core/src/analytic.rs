//! Closed-form amplitudes for the perfect gap at resonance and their
//! long-time limits.
//!
//! Amplitudes are given in the frame rotating at `omega_c` (equal to the atomic
//! frequency at resonance), so the global `exp(i omega_0 t)` phase is dropped.
//! Bath amplitudes are interaction-picture amplitudes.
//!
//! The Rabi frequency is complex: it is imaginary in the overdamped regime.
//! Every closed form depends on it only through the damped combinations
//! `exp(-G t) cos(W t / 2)` and `exp(-G t) sin(W t / 2) / W`, which are even in
//! `W` and are evaluated from exponentials whose real parts never exceed zero,
//! so arbitrarily late times neither overflow nor lose the trapped component.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::reservoir::ReservoirSpec;

/// Minimum `t * (gamma1 + gamma2)` accepted by [`spectrum_longtime`].
pub const LONG_TIME_GATE: f64 = 10.0;

/// `|x|` below which `sin(x)/x` switches to its Taylor series.
const SINC_SERIES_BELOW: f64 = 1e-3;
/// Switch-over for the bath detuning singularity, `|delta * t| < 1e-6`.
const DETUNING_SERIES_BELOW: f64 = 1e-6;

/// Single-excitation state of the atom and the two pseudomodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplitudeState {
    pub t: f64,
    pub c_a: Complex64,
    pub a_1: Complex64,
    pub a_2: Complex64,
    /// Population of the global vacuum.
    pub pi_j: f64,
}

impl AmplitudeState {
    pub fn initial() -> Self {
        AmplitudeState {
            t: 0.0,
            c_a: Complex64::new(1.0, 0.0),
            a_1: Complex64::new(0.0, 0.0),
            a_2: Complex64::new(0.0, 0.0),
            pi_j: 0.0,
        }
    }

    /// `[|c_a|^2, |a_1|^2, |a_2|^2, pi_j]`
    pub fn populations(&self) -> [f64; 4] {
        [self.c_a.norm_sqr(), self.a_1.norm_sqr(), self.a_2.norm_sqr(), self.pi_j]
    }

    pub fn trace(&self) -> f64 {
        self.populations().iter().sum()
    }
}

/// Long-time populations and amplitudes of the trapping state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrappingLimits {
    pub eta: f64,
    /// `c_a(inf) = 1 / (1 + eta^2)`
    pub c_a_inf: f64,
    /// `|a_1(inf)| = eta / (1 + eta^2)`
    pub a_1_inf: f64,
    /// `pi_j(inf) = eta^2 / (1 + eta^2)`
    pub pi_j_inf: f64,
}

pub fn trapping_limits_for_eta(eta: f64) -> TrappingLimits {
    if eta.is_infinite() {
        return TrappingLimits { eta, c_a_inf: 0.0, a_1_inf: 0.0, pi_j_inf: 1.0 };
    }
    let denom = 1.0 + eta * eta;
    TrappingLimits {
        eta,
        c_a_inf: 1.0 / denom,
        a_1_inf: eta / denom,
        pi_j_inf: eta * eta / denom,
    }
}

pub fn trapping_limits(spec: &ReservoirSpec) -> Result<TrappingLimits> {
    let gap = ResonantGap::new(spec)?;
    Ok(trapping_limits_for_eta(gap.eta()))
}

/// Parameters of a perfect-gap, resonant configuration with the closed forms
/// attached.
#[derive(Debug, Clone, Copy)]
pub struct ResonantGap {
    spec: ReservoirSpec,
    big_gamma: f64,
    big_omega: Complex64,
    /// `4 G^2 + W^2`, which equals `gamma1 gamma2 + 4 omega_big0^2`.
    norm: Complex64,
}

impl ResonantGap {
    /// Needs a valid perfect-gap spec with the atom at resonance.
    pub fn new(spec: &ReservoirSpec) -> Result<Self> {
        let report = spec.ensure_valid()?;
        let mut missing = Vec::new();
        if !report.perfect_gap {
            missing.push("perfect gap (gamma1*w2 = gamma2*w1, w2 > 0)");
        }
        if !report.resonant {
            missing.push("resonance (omega_0 = omega_c)");
        }
        if !missing.is_empty() {
            return Err(Error::AnalyticUnavailable(format!(
                "closed forms require {}",
                missing.join(" and ")
            )));
        }
        let constants = spec.derive_constants()?;
        Ok(Self::with_omega(spec, constants.big_omega))
    }

    /// Same configuration with an explicitly chosen Rabi-frequency branch.
    pub fn with_omega(spec: &ReservoirSpec, big_omega: Complex64) -> Self {
        let big_gamma = 0.25 * (spec.gamma1 + spec.gamma2);
        ResonantGap {
            spec: *spec,
            big_gamma,
            big_omega,
            norm: 4.0 * big_gamma * big_gamma + big_omega * big_omega,
        }
    }

    pub fn spec(&self) -> &ReservoirSpec {
        &self.spec
    }

    pub fn big_gamma(&self) -> f64 {
        self.big_gamma
    }

    pub fn big_omega(&self) -> Complex64 {
        self.big_omega
    }

    pub fn eta(&self) -> f64 {
        2.0 * self.spec.omega_big0 / (self.spec.gamma1 * self.spec.gamma2).sqrt()
    }

    /// Slowest transient decay rate, `G - |Im W| / 2`.
    pub fn slowest_rate(&self) -> f64 {
        self.big_gamma - 0.5 * self.big_omega.im.abs()
    }

    /// `(exp(-G t) cos(W t/2), exp(-G t) sin(W t/2) / W)`
    fn damped(&self, t: f64) -> (Complex64, Complex64) {
        let half = 0.5 * self.big_omega;
        let x = half * t;
        let decay = Complex64::new(-self.big_gamma * t, 0.0);
        let plus = (decay + Complex64::i() * x).exp();
        let minus = (decay - Complex64::i() * x).exp();
        let cos = 0.5 * (plus + minus);
        let sin_over = if x.norm() < SINC_SERIES_BELOW {
            (-self.big_gamma * t).exp() * 0.5 * t * sinc_series(x)
        } else {
            (plus - minus) / (2.0 * Complex64::i() * self.big_omega)
        };
        (cos, sin_over)
    }

    /// Atom and pseudomode amplitudes together with the vacuum population.
    pub fn amplitudes(&self, t: f64) -> AmplitudeState {
        let s = &self.spec;
        let g = self.big_gamma;
        let o0 = s.omega_big0;
        let (ec, es) = self.damped(t);
        let prod = s.gamma1 * s.gamma2;

        let c_a = 4.0 / self.norm * (0.25 * prod + 2.0 * o0 * o0 * g * es + o0 * o0 * ec);
        let a_1 = -2.0 * prod.sqrt() * o0 / self.norm * (1.0 - ec - 2.0 * g * es);
        let a_2 = -2.0 * Complex64::i() * o0 * es;
        let decay2 = (-2.0 * g * t).exp();
        let pi_j = 4.0 * o0 * o0 / self.norm
            * ((1.0 - decay2) - 8.0 * g * g * es * es - 4.0 * g * es * ec);

        AmplitudeState { t, c_a, a_1, a_2, pi_j: pi_j.re }
    }

    /// Interaction-picture bath amplitude divided by the mode coupling.
    ///
    /// `delta` is the mode detuning from `omega_c`.
    pub fn bath_amplitude_per_coupling(&self, delta: f64, t: f64) -> Complex64 {
        let s = &self.spec;
        let g = self.big_gamma;
        let o0 = s.omega_big0;
        let i = Complex64::i();
        let (ec, es) = self.damped(t);
        let w2 = self.big_omega * self.big_omega;

        let den = 4.0 * (g - i * delta) * (g - i * delta) + w2;
        let k_static = 4.0 * o0 * o0 * (2.0 * g - i * delta) / den;
        let k_sin = 2.0 * o0 * o0 * (4.0 * (i * delta * g - g * g) + w2) / den;
        let rot = (i * delta * t).exp();

        let bracket = s.gamma1 * s.gamma2 * half_window(delta, t)
            + k_static * (1.0 - rot * ec)
            + k_sin * rot * es;
        -4.0 * i / self.norm * bracket
    }

    pub fn bath_amplitude(&self, omega_lambda: f64, t: f64, g_lambda: f64) -> Complex64 {
        g_lambda * self.bath_amplitude_per_coupling(omega_lambda - self.spec.omega_c, t)
    }

    /// `rho * g^2 = omega_big0^2 D / 2pi`
    fn mode_weight(&self, omega_lambda: f64) -> f64 {
        self.spec.omega_big0.powi(2) * self.spec.structure_function_unchecked(omega_lambda) / (2.0 * PI)
    }

    /// Reservoir spectrum `rho |c_lambda|^2` built from the full bath amplitude.
    pub fn spectrum(&self, omega_lambda: f64, t: f64) -> f64 {
        let u = self.bath_amplitude_per_coupling(omega_lambda - self.spec.omega_c, t);
        self.mode_weight(omega_lambda) * u.norm_sqr()
    }

    /// Long-time spectrum with the decaying transients dropped.
    pub fn spectrum_longtime(&self, omega_lambda: f64, t: f64) -> Result<f64> {
        let s = &self.spec;
        let gate = t * (s.gamma1 + s.gamma2);
        if !(gate >= LONG_TIME_GATE) {
            return Err(Error::OutsideValidity { value: gate, threshold: LONG_TIME_GATE });
        }
        let delta = omega_lambda - s.omega_c;
        let g = self.big_gamma;
        let i = Complex64::i();
        let o0 = s.omega_big0;
        let den = 4.0 * (g - i * delta) * (g - i * delta) + self.big_omega * self.big_omega;
        let bracket = s.gamma1 * s.gamma2 * half_window(delta, t)
            + 4.0 * o0 * o0 * (2.0 * g - i * delta) / den;
        let d = s.structure_function_unchecked(omega_lambda);
        Ok(8.0 * o0 * o0 * d / (PI * self.norm.norm_sqr()) * bracket.norm_sqr())
    }

    /// Probability current between the atom and a mode, per unit frequency.
    pub fn current(&self, omega_lambda: f64, t: f64) -> f64 {
        let delta = omega_lambda - self.spec.omega_c;
        let u = self.bath_amplitude_per_coupling(delta, t);
        let c_a = self.amplitudes(t).c_a;
        let phase = (Complex64::i() * delta * t).exp();
        2.0 * (self.mode_weight(omega_lambda) * u.conj() * c_a * phase).im
    }
}

/// `exp(i d t / 2) sin(d t / 2) / (2 d)`, finite at `d = 0`.
fn half_window(delta: f64, t: f64) -> Complex64 {
    let x = 0.5 * delta * t;
    let ratio = if (delta * t).abs() < DETUNING_SERIES_BELOW {
        0.25 * t * (1.0 - x * x / 6.0)
    } else {
        x.sin() / (2.0 * delta)
    };
    Complex64::from_polar(1.0, x) * ratio
}

fn sinc_series(x: Complex64) -> Complex64 {
    let x2 = x * x;
    1.0 - x2 / 6.0 + x2 * x2 / 120.0 - x2 * x2 * x2 / 5040.0
}

pub fn amplitudes_closed_form(spec: &ReservoirSpec, t: f64) -> Result<AmplitudeState> {
    check_time(t)?;
    Ok(ResonantGap::new(spec)?.amplitudes(t))
}

pub fn bath_amplitude_closed_form(
    spec: &ReservoirSpec,
    omega_lambda: f64,
    t: f64,
    g_lambda: f64,
) -> Result<Complex64> {
    check_time(t)?;
    Ok(ResonantGap::new(spec)?.bath_amplitude(omega_lambda, t, g_lambda))
}

pub fn spectrum_longtime(spec: &ReservoirSpec, omega_lambda: f64, t: f64) -> Result<f64> {
    ResonantGap::new(spec)?.spectrum_longtime(omega_lambda, t)
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Argument(format!("time must be finite and >= 0, got {t}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fig1() -> ReservoirSpec {
        ReservoirSpec::perfect_gap(10.0, 0.2, 1.0)
    }

    fn fig4b() -> ReservoirSpec {
        ReservoirSpec::perfect_gap(0.5, 0.01, 1.0)
    }

    #[test]
    fn initial_condition() {
        for spec in [fig1(), fig4b()] {
            let s = amplitudes_closed_form(&spec, 0.0).unwrap();
            assert_relative_eq!(s.c_a.re, 1.0, epsilon = 1e-14);
            assert!(s.c_a.im.abs() < 1e-14);
            assert!(s.a_1.norm() < 1e-14);
            assert!(s.a_2.norm() < 1e-14);
            assert!(s.pi_j.abs() < 1e-14);
        }
    }

    #[test]
    fn fig1_approaches_trapping_state() {
        let s = amplitudes_closed_form(&fig1(), 50.0).unwrap();
        let p = s.populations();
        let expected = [1.0 / 9.0, 2.0 / 9.0, 0.0, 2.0 / 3.0];
        for (got, want) in p.iter().zip(expected) {
            assert!((got - want).abs() < 1e-6, "{p:?}");
        }
    }

    #[test]
    fn trace_at_finite_times() {
        for spec in [fig1(), fig4b()] {
            for t in [1.0, 5.0, 25.0] {
                let s = amplitudes_closed_form(&spec, t).unwrap();
                assert!((s.trace() - 1.0).abs() < 1e-12, "t={t} trace={}", s.trace());
            }
        }
    }

    #[test]
    fn trapping_limit_values() {
        let l = trapping_limits(&fig1()).unwrap();
        assert_relative_eq!(l.c_a_inf, 1.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(l.a_1_inf, 2f64.sqrt() / 3.0, max_relative = 1e-14);
        assert_relative_eq!(l.pi_j_inf, 2.0 / 3.0, max_relative = 1e-14);

        let weak = trapping_limits_for_eta(1e-9);
        assert_relative_eq!(weak.c_a_inf, 1.0, max_relative = 1e-12);
        assert!(weak.a_1_inf < 1e-8 && weak.pi_j_inf < 1e-12);

        let strong = trapping_limits_for_eta(1e9);
        assert!(strong.c_a_inf < 1e-12 && strong.a_1_inf < 1e-8);
        assert_relative_eq!(strong.pi_j_inf, 1.0, max_relative = 1e-12);

        let one = trapping_limits_for_eta(1.0);
        assert_relative_eq!(one.c_a_inf.powi(2), 0.25);
    }

    #[test]
    fn detuned_or_gapless_specs_are_rejected() {
        let detuned = fig1().with_detuning(0.3);
        let err = amplitudes_closed_form(&detuned, 1.0).unwrap_err();
        assert!(matches!(&err, Error::AnalyticUnavailable(m) if m.contains("resonance")));

        let lorentz = ReservoirSpec::single_lorentzian(1.0, 1.0);
        let err = trapping_limits(&lorentz).unwrap_err();
        assert!(matches!(&err, Error::AnalyticUnavailable(m) if m.contains("perfect gap")));

        let near = ReservoirSpec { gamma2: 0.2 + 1e-6, w2: 0.2 / 9.8, w1: 1.0 + 0.2 / 9.8, ..fig1() };
        assert!(matches!(ResonantGap::new(&near), Err(Error::AnalyticUnavailable(_))));
        assert!(amplitudes_closed_form(&fig1(), -1.0).is_err());
    }

    #[test]
    fn bath_amplitude_vanishes_initially_and_is_finite_at_gap() {
        let gap = ResonantGap::new(&fig1()).unwrap();
        assert_eq!(gap.bath_amplitude(0.7, 0.0, 0.3).norm(), 0.0);
        let at_gap = gap.bath_amplitude_per_coupling(0.0, 50.0);
        assert!(at_gap.norm().is_finite());
        let near = gap.bath_amplitude_per_coupling(1e-9, 50.0);
        assert!((at_gap - near).norm() < 1e-9 * 50.0 * at_gap.norm(), "{at_gap} vs {near}");
        assert_eq!(gap.spectrum(0.0, 50.0), 0.0);
    }

    /// Direct Simpson quadrature of `-i g int_0^t exp(i d s) c_a(s) ds`.
    fn bath_amplitude_by_quadrature(gap: &ResonantGap, delta: f64, t: f64) -> Complex64 {
        let n = 200_000;
        let h = t / n as f64;
        let f = |s: f64| (Complex64::i() * delta * s).exp() * gap.amplitudes(s).c_a;
        let mut acc = f(0.0) + f(t);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(k as f64 * h);
        }
        -Complex64::i() * acc * h / 3.0
    }

    #[test]
    fn bath_amplitude_matches_quadrature_of_atom_amplitude() {
        for spec in [fig1(), fig4b()] {
            let gap = ResonantGap::new(&spec).unwrap();
            for (delta, t) in [(0.1, 50.0), (-0.3, 5.0), (1.7, 12.0), (4.0, 1.0)] {
                let closed = gap.bath_amplitude_per_coupling(delta, t);
                let quad = bath_amplitude_by_quadrature(&gap, delta, t);
                assert!(
                    (closed - quad).norm() <= 1e-9 * quad.norm().max(1.0),
                    "delta={delta} t={t}: {closed} vs {quad}"
                );
            }
        }
    }

    #[test]
    fn longtime_spectrum_gate() {
        let spec = fig1();
        assert!(matches!(
            spectrum_longtime(&spec, 0.1, 0.5),
            Err(Error::OutsideValidity { .. })
        ));
        assert_eq!(spectrum_longtime(&spec, 0.0, 50.0).unwrap(), 0.0);
    }

    #[test]
    fn longtime_spectrum_is_not_stationary() {
        let spec = fig1();
        let a = spectrum_longtime(&spec, 0.05, 50.0).unwrap();
        let b = spectrum_longtime(&spec, 0.05, 55.0).unwrap();
        assert!((a - b).abs() > 1e-3 * a.abs().max(b.abs()), "{a} vs {b}");
    }

    #[test]
    fn closed_forms_satisfy_amplitude_equations() {
        let h = 1e-5;
        for spec in [fig1(), fig4b()] {
            let gap = ResonantGap::new(&spec).unwrap();
            let o0 = spec.omega_big0;
            let v = 0.5 * (spec.gamma1 * spec.gamma2).sqrt();
            let kappa = 0.5 * (spec.gamma1 + spec.gamma2);
            let i = Complex64::i();
            for k in 0..=200 {
                let t = 0.1 * k as f64 + h;
                let s = gap.amplitudes(t);
                let p = gap.amplitudes(t + h);
                let m = gap.amplitudes(t - h);
                let d = |f: fn(&AmplitudeState) -> Complex64| (f(&p) - f(&m)) / (2.0 * h);
                let r_a = i * d(|s| s.c_a) - o0 * s.a_2;
                let r_1 = i * d(|s| s.a_1) - v * s.a_2;
                let r_2 = i * d(|s| s.a_2) - (-i * kappa * s.a_2 + o0 * s.c_a + v * s.a_1);
                for r in [r_a, r_1, r_2] {
                    assert!(r.norm() <= 1e-6 * o0, "t={t} residual {r}");
                }
            }
        }
    }

    #[test]
    fn rabi_branch_is_irrelevant() {
        for spec in [fig1(), fig4b()] {
            let plus = ResonantGap::new(&spec).unwrap();
            let minus = ResonantGap::with_omega(&spec, -plus.big_omega());
            for t in [0.0, 0.3, 2.0, 17.0, 60.0] {
                let a = plus.amplitudes(t);
                let b = minus.amplitudes(t);
                assert!((a.c_a - b.c_a).norm() < 1e-13);
                assert!((a.a_1 - b.a_1).norm() < 1e-13);
                assert!((a.a_2 - b.a_2).norm() < 1e-13);
                assert!((a.pi_j - b.pi_j).abs() < 1e-13);
                let ua = plus.bath_amplitude_per_coupling(0.37, t);
                let ub = minus.bath_amplitude_per_coupling(0.37, t);
                assert!((ua - ub).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn critical_damping_is_finite() {
        // 16 omega_big0^2 = (gamma1 - gamma2)^2: W = 0.
        let spec = ReservoirSpec::perfect_gap(4.5, 0.5, 1.0);
        let gap = ResonantGap::new(&spec).unwrap();
        assert_eq!(gap.big_omega().norm(), 0.0);
        for t in [0.0, 0.5, 3.0, 40.0] {
            let s = gap.amplitudes(t);
            assert!(s.c_a.norm().is_finite());
            assert!((s.trace() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn very_late_times_stay_finite() {
        let gap = ResonantGap::new(&fig1()).unwrap();
        let s = gap.amplitudes(1e4);
        assert_relative_eq!(s.c_a.re, 1.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(s.pi_j, 2.0 / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn vacuum_population_is_integrated_second_pseudomode_loss() {
        // Trace preservation fixes the loss coefficient at gamma1 + gamma2.
        for spec in [fig1(), fig4b()] {
            let gap = ResonantGap::new(&spec).unwrap();
            let rate = spec.gamma1 + spec.gamma2;
            let t = 7.5;
            let n = 20_000;
            let h = t / n as f64;
            let f = |s: f64| gap.amplitudes(s).a_2.norm_sqr();
            let mut acc = f(0.0) + f(t);
            for k in 1..n {
                acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h);
            }
            let quad = rate * acc * h / 3.0;
            assert!((gap.amplitudes(t).pi_j - quad).abs() < 1e-8);
        }
    }

    fn gap_spec() -> impl Strategy<Value = ReservoirSpec> {
        (0.05f64..20.0, 0.01f64..0.9, 0.05f64..5.0)
            .prop_map(|(g1, ratio, o0)| ReservoirSpec::perfect_gap(g1, g1 * ratio, o0))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn trace_is_preserved(spec in gap_spec()) {
            let gap = ResonantGap::new(&spec).unwrap();
            let mut last_pi = 0.0;
            for k in 0..=400 {
                let s = gap.amplitudes(0.25 * k as f64);
                prop_assert!((s.trace() - 1.0).abs() <= 1e-9);
                prop_assert!(s.pi_j >= last_pi - 1e-12);
                last_pi = s.pi_j;
            }
        }

        #[test]
        fn late_time_matches_limits(spec in gap_spec()) {
            let gap = ResonantGap::new(&spec).unwrap();
            let limits = trapping_limits(&spec).unwrap();
            let s = gap.amplitudes(200.0 / gap.slowest_rate());
            prop_assert!((s.c_a.norm_sqr() - limits.c_a_inf.powi(2)).abs() < 1e-6);
            prop_assert!((s.a_1.norm_sqr() - limits.a_1_inf.powi(2)).abs() < 1e-6);
            prop_assert!(s.a_2.norm_sqr() < 1e-6);
            prop_assert!((s.pi_j - limits.pi_j_inf).abs() < 1e-6);
        }

        #[test]
        fn norm_identity(spec in gap_spec()) {
            let gap = ResonantGap::new(&spec).unwrap();
            let lhs = 4.0 * gap.big_gamma().powi(2) + (gap.big_omega() * gap.big_omega()).re;
            let rhs = spec.gamma1 * spec.gamma2 + 4.0 * spec.omega_big0.powi(2);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        }
    }
}
