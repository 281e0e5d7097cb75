//! Scattering-matrix model of a four-terminal ballistic electron-waveguide
//! sqrt(NOT) gate.
//!
//! The gate is described by a one-parameter family of 4x4 scattering matrices
//! ([`smatrix`]). From a matrix the crate computes output probabilities, the
//! fidelity against the ideal equal superposition, and zero-frequency auto and
//! cross shot noise ([`transport`]). [`sweep`] tabulates these along the gate
//! parameter and locates their roots and extrema, [`oracle`] checks them
//! against Monte-Carlo partition noise and brute-force scans, and [`cli`]
//! drives everything from the command line.

pub mod cli;
pub mod error;
pub mod oracle;
pub mod plot;
pub mod smatrix;
pub mod sweep;
pub mod transport;

pub use error::{Error, Result};
pub use smatrix::{
    build_sqrt_not, norm_diagnostics, sqrt_not, unitarity_deviation, GateParameter, Lead,
    NormDiagnostics, ScatteringMatrix, Side,
};
pub use sweep::{sweep_kappa, ExtremumReport, FeatureKind, KappaRange, SweepRecord};
pub use transport::{
    fidelity, noise_prefactor, output_probabilities, output_state, shot_noise_auto,
    shot_noise_cross, BiasConfig, NoiseKind, NoiseResult, QubitState,
};
