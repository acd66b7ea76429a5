//! Single-excitation dynamics of a two-level atom coupled to a reservoir whose
//! structure function is a difference of two Lorentzians sharing one centre.
//!
//! Three independent routes to the same physics are provided:
//!
//! * [`analytic`]: closed-form amplitudes for a perfect gap at resonance,
//!   together with their long-time trapping limits;
//! * [`dynamics::integrate_pseudomodes`]: adaptive integration of the
//!   two-pseudomode amplitude equations, valid for any gap depth and detuning;
//! * [`dynamics::integrate_bath`]: brute-force integration of the Schrödinger
//!   equation over a uniformly discretized bath, used as the oracle.
//!
//! On top of these, [`observables`] computes reservoir spectra and probability
//! currents, while [`entanglement`] covers concurrences and the
//! frequency-resolved densities of entanglement.
//!
//! All amplitudes are stored in the frame rotating at the gap frequency
//! `omega_c` (pseudomodes, closed forms) or in the interaction picture with
//! respect to the free Hamiltonian (discretized bath). Both conventions agree
//! for the atom at resonance, and every observable depends only on moduli or on
//! frame-invariant phase differences.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod dynamics;
pub mod entanglement;
mod error;
pub mod observables;
pub mod ode;
pub mod reservoir;

pub use num_complex::Complex64;

pub use analytic::{AmplitudeState, ResonantGap, TrappingLimits};
pub use dynamics::{BathGrid, BathState};
pub use entanglement::{ConcurrenceRecord, EntanglementDensities, EntanglementTotals};
pub use error::{Error, Result};
pub use observables::{CurrentSlice, SpectrumSlice};
pub use reservoir::{DerivedConstants, ReservoirSpec, ValidationReport, Violation};
