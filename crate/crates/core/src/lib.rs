//! Simplified quantum kernelized binary classifiers and amplitude estimation
//! on a dense statevector simulator.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below are what the experiment harness and CLI use.

pub mod amplitude_estimation;
pub mod classifiers;
pub mod datasets;
pub mod encoding;
pub mod error;
pub mod experiments;
pub mod rng;
pub mod scalar;
pub mod sim;
pub mod tolerance;

pub use error::{QkcError, Result};
pub use scalar::Real;

pub type StateVector64 = sim::StateVector<f64>;
pub type StateVector32 = sim::StateVector<f32>;
pub type GateSpec64 = sim::GateSpec<f64>;
pub type Matrix64 = sim::Matrix<f64>;
pub type LabeledDataset64 = encoding::LabeledDataset<f64>;
pub type LabeledDataset32 = encoding::LabeledDataset<f32>;
pub type ClassifierOutcome64 = classifiers::ClassifierOutcome<f64>;
pub type StatePrepOracle64 = amplitude_estimation::StatePrepOracle<f64>;
