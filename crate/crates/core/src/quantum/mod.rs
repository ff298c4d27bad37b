//! Dense finite-dimensional quantum states over named optical modes.
//!
//! A mode is either a polarization [`ModeKind::Qubit`] (basis `{0, 1}` for H
//! and V) or a [`ModeKind::Photon`] spatial mode holding at most one photon
//! (basis `{VAC, 0, 1}`). Amplitudes are indexed row-major in mode order, with
//! the first mode most significant. The largest space used by the protocol is
//! qubit ⊗ photon ⊗ photon, i.e. 18 amplitudes, so everything is dense.

mod density;
mod measure;
mod mode;
mod operator;
mod state;

pub use density::DensityMatrix;
pub use measure::{
    bell_branches, bell_measure, measure_mode, measure_photon_mode, photon_branches, BellOutcome,
    MeasurementOutcome,
};
pub use mode::{BasisLabel, Mode, ModeKind};
pub use operator::{ModeOperator, OperatorKind};
pub use state::{BellSign, StateVector};

pub use num_complex::Complex64;

/// Tolerance for algebraic identities (unitarity, Hermiticity, norms).
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Tolerance for probability normalization over complete outcome sets.
pub const PROBABILITY_TOL: f64 = 1e-10;
