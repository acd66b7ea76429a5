//! Reservoir parameters with the structure function and derived constants.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `w1 - w2 = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Relative tolerance on the perfect-gap condition `gamma1 * w2 = gamma2 * w1`.
pub const GAP_REL_TOL: f64 = 1e-12;

/// Structure-function and atom parameters.
///
/// `D(w) = w1 * gamma1 / ((w - omega_c)^2 + gamma1^2/4) - w2 * gamma2 / ((w - omega_c)^2 + gamma2^2/4)`
///
/// Rates and frequencies share one unit; with the default `omega_big0 = 1`
/// that unit is the overall coupling strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReservoirSpec {
    pub gamma1: f64,
    pub gamma2: f64,
    pub w1: f64,
    pub w2: f64,
    #[serde(default)]
    pub omega_c: f64,
    #[serde(default)]
    pub omega_0: f64,
    #[serde(default = "one")]
    pub omega_big0: f64,
}

fn one() -> f64 {
    1.0
}

impl ReservoirSpec {
    /// Perfect-gap reservoir at resonance with the atom, `omega_c = omega_0 = 0`.
    ///
    /// The weights follow from `w1 - w2 = 1` and `gamma1 * w2 = gamma2 * w1`.
    pub fn perfect_gap(gamma1: f64, gamma2: f64, omega_big0: f64) -> Self {
        let diff = gamma1 - gamma2;
        ReservoirSpec {
            gamma1,
            gamma2,
            w1: gamma1 / diff,
            w2: gamma2 / diff,
            omega_c: 0.0,
            omega_0: 0.0,
            omega_big0,
        }
    }

    /// A single normalized Lorentzian of width `gamma1` (second weight zero).
    pub fn single_lorentzian(gamma1: f64, omega_big0: f64) -> Self {
        ReservoirSpec {
            gamma1,
            gamma2: 0.0,
            w1: 1.0,
            w2: 0.0,
            omega_c: 0.0,
            omega_0: 0.0,
            omega_big0,
        }
    }

    pub fn with_detuning(mut self, omega_0: f64) -> Self {
        self.omega_0 = omega_0;
        self
    }

    pub fn validate(&self) -> ValidationReport {
        validate_spec(self)
    }

    /// Fails with the full report when any invariant is violated.
    pub fn ensure_valid(&self) -> Result<ValidationReport> {
        let report = validate_spec(self);
        if report.is_valid() {
            Ok(report)
        } else {
            Err(Error::InvalidSpec(report))
        }
    }

    pub fn structure_function(&self, omega: f64) -> Result<f64> {
        self.ensure_valid()?;
        Ok(self.structure_function_unchecked(omega))
    }

    /// `D(omega)` without re-validating; callers must hold a valid spec.
    pub fn structure_function_unchecked(&self, omega: f64) -> f64 {
        let d2 = (omega - self.omega_c).powi(2);
        if self.is_perfect_gap() {
            // Over a common denominator the constant term cancels identically.
            let q1 = 0.25 * self.gamma1 * self.gamma1;
            let q2 = 0.25 * self.gamma2 * self.gamma2;
            let slope = self.w1 * self.gamma1 - self.w2 * self.gamma2;
            return (d2 * slope / ((d2 + q1) * (d2 + q2))).max(0.0);
        }
        let first = self.w1 * lorentzian(self.gamma1, d2);
        let second = if self.w2 == 0.0 {
            0.0
        } else {
            self.w2 * lorentzian(self.gamma2, d2)
        };
        first - second
    }

    pub fn derive_constants(&self) -> Result<DerivedConstants> {
        self.ensure_valid()?;
        Ok(DerivedConstants::from_valid(self))
    }

    pub fn is_perfect_gap(&self) -> bool {
        perfect_gap(self)
    }

    pub fn is_resonant(&self) -> bool {
        (self.omega_0 - self.omega_c).abs() <= 1e-12 * self.omega_c.abs().max(1.0)
    }
}

fn lorentzian(gamma: f64, d2: f64) -> f64 {
    gamma / (d2 + 0.25 * gamma * gamma)
}

fn perfect_gap(spec: &ReservoirSpec) -> bool {
    let lhs = spec.gamma1 * spec.w2;
    let rhs = spec.gamma2 * spec.w1;
    spec.w2 > 0.0 && (lhs - rhs).abs() <= GAP_REL_TOL * lhs.abs().max(rhs.abs())
}

/// A violated invariant of [`ReservoirSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NonFinite { field: String },
    NonPositiveGamma1 { gamma1: f64 },
    NegativeGamma2 { gamma2: f64 },
    NonPositiveW1 { w1: f64 },
    NegativeW2 { w2: f64 },
    NegativeCoupling { omega_big0: f64 },
    Normalization { w1_minus_w2: f64 },
    /// `D(omega_c) < 0`, equivalently `w1 * gamma2 < w2 * gamma1`.
    NegativeAtCentre { gamma_p1: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFinite { field } => write!(f, "{field} is not finite"),
            Violation::NonPositiveGamma1 { gamma1 } => write!(f, "gamma1 = {gamma1} must be > 0"),
            Violation::NegativeGamma2 { gamma2 } => write!(f, "gamma2 = {gamma2} must be >= 0"),
            Violation::NonPositiveW1 { w1 } => write!(f, "w1 = {w1} must be > 0"),
            Violation::NegativeW2 { w2 } => write!(f, "w2 = {w2} must be >= 0"),
            Violation::NegativeCoupling { omega_big0 } => {
                write!(f, "omega_big0 = {omega_big0} must be >= 0")
            }
            Violation::Normalization { w1_minus_w2 } => {
                write!(f, "w1 - w2 = {w1_minus_w2} but must equal 1")
            }
            Violation::NegativeAtCentre { gamma_p1 } => write!(
                f,
                "structure function negative at omega_c (w1*gamma2 - w2*gamma1 = {gamma_p1})"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub perfect_gap: bool,
    pub resonant: bool,
    /// `16 omega_big0^2 > (gamma1 - gamma2)^2`: the Rabi frequency is real.
    pub oscillatory_regime: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Inspect a spec and list every violated invariant. Never fails.
pub fn validate_spec(spec: &ReservoirSpec) -> ValidationReport {
    let mut violations = Vec::new();
    let fields = [
        ("gamma1", spec.gamma1),
        ("gamma2", spec.gamma2),
        ("w1", spec.w1),
        ("w2", spec.w2),
        ("omega_c", spec.omega_c),
        ("omega_0", spec.omega_0),
        ("omega_big0", spec.omega_big0),
    ];
    for (name, value) in fields {
        if !value.is_finite() {
            violations.push(Violation::NonFinite { field: name.to_string() });
        }
    }
    if !(spec.gamma1 > 0.0) {
        violations.push(Violation::NonPositiveGamma1 { gamma1: spec.gamma1 });
    }
    if !(spec.gamma2 >= 0.0) {
        violations.push(Violation::NegativeGamma2 { gamma2: spec.gamma2 });
    }
    if !(spec.w1 > 0.0) {
        violations.push(Violation::NonPositiveW1 { w1: spec.w1 });
    }
    if !(spec.w2 >= 0.0) {
        violations.push(Violation::NegativeW2 { w2: spec.w2 });
    }
    if !(spec.omega_big0 >= 0.0) {
        violations.push(Violation::NegativeCoupling { omega_big0: spec.omega_big0 });
    }
    let norm = spec.w1 - spec.w2;
    if !((norm - 1.0).abs() <= NORMALIZATION_TOL) {
        violations.push(Violation::Normalization { w1_minus_w2: norm });
    }
    let gap = perfect_gap(spec);
    let gamma_p1 = spec.w1 * spec.gamma2 - spec.w2 * spec.gamma1;
    if !gap && gamma_p1 < 0.0 {
        violations.push(Violation::NegativeAtCentre { gamma_p1 });
    }

    let split = spec.gamma1 - spec.gamma2;
    ValidationReport {
        violations,
        perfect_gap: gap,
        resonant: spec.is_resonant(),
        oscillatory_regime: 16.0 * spec.omega_big0 * spec.omega_big0 > split * split,
    }
}

/// Constants derived once from a valid [`ReservoirSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// Decay rate of the first pseudomode, `w1*gamma2 - w2*gamma1`.
    pub gamma_p1: f64,
    /// Decay rate of the second pseudomode, `w1*gamma1 - w2*gamma2`.
    pub gamma_p2: f64,
    /// Pseudomode-pseudomode coupling `sqrt(w1*w2) * (gamma1 - gamma2) / 2`.
    pub v: f64,
    /// `(gamma1 + gamma2) / 4`.
    pub big_gamma: f64,
    /// `sqrt(16 omega_big0^2 - (gamma1 - gamma2)^2) / 2`, principal branch.
    pub big_omega: Complex64,
    /// `2 omega_big0 / sqrt(gamma1 * gamma2)`.
    pub eta: f64,
}

impl DerivedConstants {
    pub(crate) fn from_valid(spec: &ReservoirSpec) -> Self {
        let (g1, g2) = (spec.gamma1, spec.gamma2);
        let (gamma_p1, gamma_p2, v) = if spec.is_perfect_gap() {
            (0.0, g1 + g2, 0.5 * (g1 * g2).sqrt())
        } else {
            (
                (spec.w1 * g2 - spec.w2 * g1).max(0.0),
                spec.w1 * g1 - spec.w2 * g2,
                0.5 * (spec.w1 * spec.w2).sqrt() * (g1 - g2),
            )
        };
        let radicand = 16.0 * spec.omega_big0 * spec.omega_big0 - (g1 - g2).powi(2);
        DerivedConstants {
            gamma_p1,
            gamma_p2,
            v,
            big_gamma: 0.25 * (g1 + g2),
            big_omega: 0.5 * Complex64::new(radicand, 0.0).sqrt(),
            eta: 2.0 * spec.omega_big0 / (g1 * g2).sqrt(),
        }
    }
}

pub fn derive_constants(spec: &ReservoirSpec) -> Result<DerivedConstants> {
    spec.derive_constants()
}

pub fn structure_function(spec: &ReservoirSpec, omega: f64) -> Result<f64> {
    spec.structure_function(omega)
}

/// `(1/2pi) * integral of D over [omega_c - half_width, omega_c + half_width]`,
/// in closed form.
pub fn coupling_coverage(spec: &ReservoirSpec, half_width: f64) -> f64 {
    let window = |gamma: f64| {
        if gamma == 0.0 {
            // Zero-width Lorentzian term: a 2pi delta at the centre.
            2.0 * PI
        } else {
            4.0 * (2.0 * half_width / gamma).atan()
        }
    };
    let second = if spec.w2 == 0.0 { 0.0 } else { spec.w2 * window(spec.gamma2) };
    (spec.w1 * window(spec.gamma1) - second) / (2.0 * PI)
}
