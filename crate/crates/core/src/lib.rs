//! Envelope (multiple-scales) solutions for a scalar dispersive wave
//! equation with a cubic Kerr nonlinearity, together with a high-precision
//! pseudospectral reference solver for the rational-susceptibility
//! (Sellmeier-transformed) form of the same equation.
//!
//! The crate has two halves that meet in [`harness`]:
//!
//! * the analytic side — [`susceptibility`], [`modes`], [`mms`], [`init`] —
//!   resolves a complex dispersion branch ω(k), builds the envelope
//!   equation coefficients, and propagates the envelopes exactly in
//!   spectral space;
//! * the numeric side — [`refsolver`] — integrates the wave equation
//!   itself with a dealiased pseudospectral RK4 scheme and provides the
//!   ground truth the envelope solution is judged against.

// Hot loops index several parallel arrays at once, and validation guards
// use negated comparisons so NaN parameters are rejected too.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod init;
pub mod mms;
pub mod modes;
pub mod presets;
pub mod refsolver;
pub mod spectral;
pub mod susceptibility;

pub use error::{Error, Result};
pub use harness::{run_scenario, ScenarioConfig, ValidationReport};
pub use mms::{compute_coefficients, MmsCoefficients, MmsSolution, Posedness};
pub use modes::{branch_at, DispersionBranch};
pub use spectral::{Dft, Grid, SpectralField};
pub use susceptibility::SusceptibilityModel;
