//! Propagation of a quantum state through a time-ramped harmonic potential,
//! three independent ways: an eigenfunction-expansion integrator (with a
//! growing or fixed active basis), a Crank-Nicolson spatial-grid propagator,
//! and an exact Gaussian-ansatz solution — plus diagnostics that expose when
//! and how the expansion scheme loses normalization.

pub mod basis;
pub mod config;
pub mod coupled;
pub mod experiment;
pub mod diagnostics;
pub mod error;
pub mod oracle;
pub mod rk4;
pub mod scalar;
pub mod schedule;
pub mod series;

pub use error::{Error, Result};
pub use scalar::Real;

/// Concrete double-precision aliases for the generic core types.
pub type OscillatorModel64 = basis::OscillatorModel<f64>;
pub type GridSpec64 = basis::GridSpec<f64>;
pub type RampSchedule64 = schedule::RampSchedule<f64>;
pub type CoefficientState64 = coupled::CoefficientState<f64>;
pub type IntegrationSettings64 = rk4::IntegrationSettings<f64>;
pub type DiagnosticsRecord64 = diagnostics::DiagnosticsRecord<f64>;
