//! Exact simulation of the quantum dense key distribution (QDKD) protocol
//! together with the eavesdropping strategies that defeat its entropic
//! security condition.
//!
//! The crate is organised bottom-up:
//!
//! * [`quantum`] is a small dense state-vector engine for polarization qubits
//!   and photon modes that may be empty (vacuum).
//! * [`protocol`] runs individual protocol rounds and whole seeded experiments.
//! * [`attacks`] holds the eavesdropper strategies plugged into the rounds.
//! * [`analysis`] has the closed-form predictions and the empirical estimators
//!   used to compare them against Monte-Carlo logs.

pub mod analysis;
pub mod attacks;
mod error;
pub mod protocol;
pub mod quantum;

pub use error::{Error, Result};
