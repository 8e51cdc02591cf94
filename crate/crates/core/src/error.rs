use thiserror::Error;

use crate::linalg::Subsystem;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("state is not normalized: squared norm {0}")]
    NotNormalized(f64),

    #[error("basis and amplitude lengths differ ({basis} vs {amplitudes})")]
    LengthMismatch { basis: usize, amplitudes: usize },

    #[error("duplicate basis label {0}")]
    DuplicateLabel(String),

    #[error("subsystem {0} appears in both factors")]
    SubsystemOverlap(Subsystem),

    #[error("subsystem {0} is not part of this state")]
    UnknownSubsystem(Subsystem),

    #[error("basis is not a complete tensor product: {0}")]
    NotProductBasis(String),

    #[error("matrix is not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(
        "phase convention is not unitary (reflection - transmission = {0} rad, needs pi/2 mod pi)"
    )]
    NonUnitaryConvention(f64),

    #[error("optical path is empty")]
    EmptyPath,

    #[error("invalid detector pair ({0}, {1})")]
    InvalidDetectorPair(u8, u8),

    #[error("non-finite phase {0}")]
    NonFinitePhase(f64),

    #[error("phase grid is empty")]
    EmptyGrid,

    #[error("phase grid is invalid: {0}")]
    InvalidGrid(String),

    #[error("input component {0} lies outside the calibrated subspace")]
    OutsideCalibratedSubspace(String),

    #[error("trial count must be at least {min}, got {got}")]
    TooFewTrials { min: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, SimError>;
