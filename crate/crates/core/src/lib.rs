//! Simulation of single-photon and two-photon interferometers.
//!
//! Two independent routes compute every detection probability: a path sum
//! over optical paths ([`circuits`]) and state-vector propagation through
//! element matrices ([`measurement`]). On top of them sit coincidence
//! statistics, correlation sweeps and CHSH values ([`analysis`]), seeded
//! Monte Carlo click sampling ([`montecarlo`]) and a CSV-emitting CLI.

pub mod analysis;
pub mod circuits;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod measurement;
pub mod montecarlo;
pub mod optics;
pub mod output;

pub use analysis::{ChshSettings, CoincidenceTable, SweepResult};
pub use circuits::{DetectorPair, MziCircuit, RtoCircuit};
pub use error::{Result, SimError};
pub use linalg::{BasisLabel, ComplexAmplitude, DensityMatrix, StateVector, Subsystem};
pub use optics::{OpticalElement, PhaseConvention};
