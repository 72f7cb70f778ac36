//! Simulation and analysis of polarization-entangled photon pairs.
//!
//! States and waveplates live in [`jones`] (amplitudes ordered `HH, HV, VH, VV`,
//! port `a` first). [`source`] turns a Bell-state source model into Poisson
//! coincidence counts, [`analysis`] computes visibility, CHSH `S` and a Bell-state
//! label from counts, and [`tomography`] reconstructs the density matrix from the
//! 36-setting data set. All angles are radians; degrees appear only in files and
//! on the command line.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod density;
pub mod error;
pub mod io;
pub mod jones;
pub mod measurement;
pub mod source;
pub mod tomography;

pub use density::DensityMatrix;
pub use error::{Error, Result};
pub use jones::{
    apply_plan, bell_state, hwp, hwp_plan, pauli, retardance, retarder_matrix, BellLabel, JonesVector,
    OneQubitOperator, Pauli, Port, Retarder, TwoQubitState, WaveplatePlacement, C64,
};
pub use measurement::{coincidence_probability, correlation_pattern, AnalyzerSetting, NamedSetting};
pub use source::{generate_dataset, CountRecord, SourceConfig};
pub use tomography::{reconstruct, Method, MleConfig, TomographyData, TomographyResult};
