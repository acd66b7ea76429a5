//! Atom-pseudomode concurrences with their tangle, plus the frequency-resolved
//! densities of entanglement with the reservoir.
//!
//! In the single-excitation sector every reduced two-qubit state is an X state
//! with one vanishing corner population, so the concurrence of the atom with a
//! mode carrying amplitude `b` is `2 |c_a| |b|`.

use num_complex::Complex64;
use serde::Serialize;

use crate::analytic::AmplitudeState;
use crate::error::{Error, Result};
use crate::observables::{trapezoid, SpectrumSlice};

/// States whose trace deviates from 1 by more than this are rejected.
pub const TRACE_TOL: f64 = 1e-6;

/// Size above which the mode-mode density is kept as a row generator.
pub const DENSE_LIMIT: usize = 2000;

/// Squared concurrences at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcurrenceRecord {
    pub t: f64,
    /// Atom and pseudomode 1.
    pub c2_a1: f64,
    /// Atom and pseudomode 2.
    pub c2_a2: f64,
    /// Atom and the collective pseudomode qubit.
    pub c2_a12: f64,
    pub tangle: f64,
}

pub fn concurrences(state: &AmplitudeState) -> Result<ConcurrenceRecord> {
    let deviation = (state.trace() - 1.0).abs();
    if !(deviation <= TRACE_TOL) {
        return Err(Error::TraceViolation { deviation, tolerance: TRACE_TOL });
    }
    let atom = state.c_a.norm_sqr();
    let p1 = state.a_1.norm_sqr();
    let p2 = state.a_2.norm_sqr();
    let c2_a1 = 4.0 * atom * p1;
    let c2_a2 = 4.0 * atom * p2;
    // Collective qubit |1_ps> carries amplitude sqrt(|a_1|^2 + |a_2|^2).
    let c2_a12 = 4.0 * atom * (p1 + p2);
    Ok(ConcurrenceRecord {
        t: state.t,
        c2_a1,
        c2_a2,
        c2_a12,
        tangle: c2_a12 - c2_a1 - c2_a2,
    })
}

/// Atom-mode density `4 |c_a|^2 S(omega)`.
pub fn density_atom_modes(c_a: Complex64, spectrum: &SpectrumSlice) -> Vec<f64> {
    let scale = 4.0 * c_a.norm_sqr();
    spectrum.values.iter().map(|s| scale * s).collect()
}

/// Mode-mode density `2 S(omega_lambda) S(omega_mu)`.
///
/// Materialized as a full matrix up to [`DENSE_LIMIT`] modes; larger grids keep
/// only the spectrum and generate rows on demand.
#[derive(Debug, Clone, PartialEq)]
pub enum ModeModeDensity {
    Dense { n: usize, entries: Vec<f64> },
    Lazy { spectrum: Vec<f64> },
}

impl ModeModeDensity {
    pub fn len(&self) -> usize {
        match self {
            ModeModeDensity::Dense { n, .. } => *n,
            ModeModeDensity::Lazy { spectrum } => spectrum.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_dense(&self) -> bool {
        matches!(self, ModeModeDensity::Dense { .. })
    }

    pub fn get(&self, lambda: usize, mu: usize) -> f64 {
        match self {
            ModeModeDensity::Dense { n, entries } => entries[lambda * n + mu],
            ModeModeDensity::Lazy { spectrum } => 2.0 * spectrum[lambda] * spectrum[mu],
        }
    }

    pub fn row(&self, mu: usize) -> Vec<f64> {
        match self {
            ModeModeDensity::Dense { n, entries } => entries[mu * n..(mu + 1) * n].to_vec(),
            ModeModeDensity::Lazy { spectrum } => spectrum.iter().map(|s| 2.0 * s * spectrum[mu]).collect(),
        }
    }

    /// Square block over the index range, row-major.
    pub fn block(&self, range: std::ops::Range<usize>) -> Vec<f64> {
        let mut out = Vec::with_capacity(range.len() * range.len());
        for i in range.clone() {
            for j in range.clone() {
                out.push(self.get(i, j));
            }
        }
        out
    }
}

pub fn density_modes_modes(spectrum: &SpectrumSlice) -> ModeModeDensity {
    let s = &spectrum.values;
    if s.len() <= DENSE_LIMIT {
        let n = s.len();
        let mut entries = Vec::with_capacity(n * n);
        for a in s {
            entries.extend(s.iter().map(|b| 2.0 * a * b));
        }
        ModeModeDensity::Dense { n, entries }
    } else {
        ModeModeDensity::Lazy { spectrum: s.clone() }
    }
}

/// Frequency-integrated entanglement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementTotals {
    pub t: f64,
    /// Atom with the reservoir modes.
    pub c2_a_total: f64,
    /// Among the reservoir modes.
    pub c2_r_total: f64,
    pub c2_total: f64,
}

/// Trapezoidal quadratures of both densities. The double integral of the
/// separable mode-mode density factorizes into the square of a single one.
pub fn entanglement_totals(c_a: Complex64, spectrum: &SpectrumSlice) -> EntanglementTotals {
    let e_a = density_atom_modes(c_a, spectrum);
    let c2_a_total = trapezoid(&e_a, spectrum.delta_omega);
    let reservoir = spectrum.integral();
    let c2_r_total = 2.0 * reservoir * reservoir;
    EntanglementTotals {
        t: spectrum.t,
        c2_a_total,
        c2_r_total,
        c2_total: c2_a_total + c2_r_total,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementDensities {
    pub t: f64,
    pub e_a: Vec<f64>,
    pub e_r: ModeModeDensity,
    pub totals: EntanglementTotals,
}

impl EntanglementDensities {
    pub fn new(c_a: Complex64, spectrum: &SpectrumSlice) -> Self {
        EntanglementDensities {
            t: spectrum.t,
            e_a: density_atom_modes(c_a, spectrum),
            e_r: density_modes_modes(spectrum),
            totals: entanglement_totals(c_a, spectrum),
        }
    }
}
