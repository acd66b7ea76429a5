//! Reservoir spectrum and probability currents on a bath grid.

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{BathGrid, BathState};
use crate::error::{Error, Result};

/// `S(omega, t) = rho |c_lambda(t)|^2` sampled on the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSlice {
    pub t: f64,
    pub values: Vec<f64>,
    /// Grid spacing; the density of modes is its reciprocal.
    pub delta_omega: f64,
}

impl SpectrumSlice {
    /// Trapezoidal integral of the spectrum over the grid: the reservoir
    /// population.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.values, self.delta_omega)
    }
}

/// Mode-resolved currents `J_lambda,a(t)` and their integral `Q(t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurrentSlice {
    pub t: f64,
    pub j_values: Vec<f64>,
    pub q: f64,
}

pub(crate) fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values {
        [] => 0.0,
        [x] => x * step,
        [first, inner @ .., last] => step * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}

fn check_lengths(grid: &BathGrid, state: &BathState) -> Result<()> {
    if grid.n_modes() == state.c_lambdas.len() {
        Ok(())
    } else {
        Err(Error::Structural(format!(
            "grid has {} modes but state has {} amplitudes",
            grid.n_modes(),
            state.c_lambdas.len()
        )))
    }
}

pub fn spectrum(grid: &BathGrid, state: &BathState) -> Result<SpectrumSlice> {
    check_lengths(grid, state)?;
    let rho = grid.density_of_modes();
    Ok(SpectrumSlice {
        t: state.t,
        values: state.c_lambdas.iter().map(|c| rho * c.norm_sqr()).collect(),
        delta_omega: grid.delta_omega,
    })
}

/// `J = 2 Im{rho g conj(c_lambda) c_a exp(i delta t)}` with the mode detuning
/// taken from the atomic frequency `omega_0`, the convention the bath
/// integrator uses for its interaction picture.
pub fn current(grid: &BathGrid, state: &BathState, omega_0: f64) -> Result<CurrentSlice> {
    check_lengths(grid, state)?;
    let rho = grid.density_of_modes();
    let t = state.t;
    let j_values: Vec<f64> = grid
        .omegas
        .iter()
        .zip(&grid.couplings)
        .zip(&state.c_lambdas)
        .map(|((&w, &g), &c)| {
            let phase = Complex64::from_polar(1.0, (w - omega_0) * t);
            2.0 * (rho * g * c.conj() * state.c_a * phase).im
        })
        .collect();
    let q = trapezoid(&j_values, grid.delta_omega);
    Ok(CurrentSlice { t, j_values, q })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{build_bath_grid, integrate_bath, uniform_times};
    use crate::reservoir::ReservoirSpec;

    #[test]
    fn vacuum_has_no_spectrum_or_current() {
        let spec = ReservoirSpec::perfect_gap(10.0, 0.2, 1.0);
        let grid = build_bath_grid(&spec, 101, 10.0).unwrap();
        let state = BathState {
            t: 0.0,
            c_a: Complex64::new(1.0, 0.0),
            c_lambdas: vec![Complex64::new(0.0, 0.0); 101],
        };
        assert!(spectrum(&grid, &state).unwrap().values.iter().all(|&s| s == 0.0));
        let j = current(&grid, &state, 0.0).unwrap();
        assert!(j.j_values.iter().all(|&x| x == 0.0));
        assert_eq!(j.q, 0.0);
    }

    #[test]
    fn length_mismatch_is_structural() {
        let spec = ReservoirSpec::perfect_gap(10.0, 0.2, 1.0);
        let grid = build_bath_grid(&spec, 11, 10.0).unwrap();
        let state = BathState { t: 0.0, c_a: Complex64::new(1.0, 0.0), c_lambdas: vec![] };
        assert!(matches!(spectrum(&grid, &state), Err(Error::Structural(_))));
        assert!(matches!(current(&grid, &state, 0.0), Err(Error::Structural(_))));
    }

    #[test]
    fn gap_mode_stays_dark_and_population_balances() {
        let spec = ReservoirSpec::perfect_gap(10.0, 0.2, 1.0);
        let grid = build_bath_grid(&spec, 1001, 20.0).unwrap();
        let centre = grid.nearest(0.0);
        assert_eq!(grid.omegas[centre], 0.0);
        let states = integrate_bath(&spec, &grid, &uniform_times(10.0, 21), 1e-9).unwrap();
        for s in &states {
            let slice = spectrum(&grid, s).unwrap();
            assert_eq!(slice.values[centre], 0.0);
            assert!(slice.values.iter().all(|&v| v >= 0.0));
            assert!((slice.integral() + s.c_a.norm_sqr() - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn spectrum_is_frame_invariant() {
        let spec = ReservoirSpec::perfect_gap(10.0, 0.2, 1.0);
        let grid = build_bath_grid(&spec, 51, 5.0).unwrap();
        let states = integrate_bath(&spec, &grid, &[0.0, 3.0], 1e-9).unwrap();
        let s = &states[1];
        let rotated = BathState {
            t: s.t,
            c_a: s.c_a,
            c_lambdas: s
                .c_lambdas
                .iter()
                .zip(&grid.omegas)
                .map(|(c, w)| c * Complex64::from_polar(1.0, -w * s.t))
                .collect(),
        };
        let a = spectrum(&grid, s).unwrap();
        let b = spectrum(&grid, &rotated).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() <= 1e-14 * x.max(1e-300));
        }
    }

    #[test]
    fn trapezoid_edge_cases() {
        assert_eq!(trapezoid(&[], 1.0), 0.0);
        assert_eq!(trapezoid(&[2.0], 0.5), 1.0);
        assert_eq!(trapezoid(&[1.0, 1.0, 1.0], 0.5), 1.0);
    }
}
