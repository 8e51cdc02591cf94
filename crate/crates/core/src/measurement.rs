//! Ideal which-path measurement and the state-vector route through the
//! two-photon circuit.
//!
//! The detector B is a two-mode system like a photon, plus a formal `ready`
//! mode it occupies before the interaction. [`propagate`] applies 2×2
//! element matrices as `U⊗I` or `I⊗U`; it shares no code with the path sum
//! in [`crate::circuits`] and serves as its oracle.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::analysis::CoincidenceTable;
use crate::circuits::RtoCircuit;
use crate::error::{Result, SimError};
use crate::linalg::{
    composite_index, outer, partial_trace, CMatrix, Mode, StateVector, Subsystem, TOL, ZERO,
};
use crate::optics::element_unitary;

/// `(|A1⟩|B1⟩ + e^{iφ}|A2⟩|B2⟩)/√2`
pub fn entangled_pair(phi: f64) -> StateVector {
    StateVector::composite([
        Complex64::new(FRAC_1_SQRT_2, 0.0),
        ZERO,
        ZERO,
        Complex64::from_polar(FRAC_1_SQRT_2, phi),
    ])
    .expect("unit norm by construction")
}

/// The zero-phase entangled state produced by an ideal measurement.
pub fn measurement_state() -> StateVector {
    entangled_pair(0.0)
}

/// Calibration `|Aj⟩|ready⟩ → |Aj⟩|B pointer[j]⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasurementMap {
    pointer: [Mode; 2],
}

impl Default for MeasurementMap {
    fn default() -> Self {
        Self {
            pointer: [Mode::One, Mode::Two],
        }
    }
}

impl MeasurementMap {
    /// Pointer modes must be distinct path modes so the map is an isometry.
    pub fn new(pointer: [Mode; 2]) -> Result<Self> {
        if pointer.iter().any(|m| m.index().is_none()) || pointer[0] == pointer[1] {
            return Err(SimError::OutsideCalibratedSubspace(format!(
                "pointer modes {}, {} are not distinct path modes",
                pointer[0], pointer[1]
            )));
        }
        Ok(Self { pointer })
    }

    pub fn pointer(&self, a_mode: Mode) -> Option<Mode> {
        a_mode.index().map(|i| self.pointer[i])
    }
}

/// Maps `α|A1⟩|ready⟩ + β|A2⟩|ready⟩` to `α|A1⟩|B1⟩ + β|A2⟩|B2⟩` by linearity.
pub fn apply_measurement(input: &StateVector, map: &MeasurementMap) -> Result<StateVector> {
    if input.subsystems() != [Subsystem::A, Subsystem::B] {
        return Err(SimError::OutsideCalibratedSubspace(format!(
            "expected A ⊗ B factors, got {:?}",
            input.subsystems()
        )));
    }
    let mut out = [ZERO; 4];
    for (ket, amp) in input.basis().iter().zip(input.amplitudes()) {
        if *amp == ZERO {
            continue;
        }
        let a = ket.label_for(Subsystem::A).expect("factor present");
        let b = ket.label_for(Subsystem::B).expect("factor present");
        let pointer = match (b.mode, map.pointer(a.mode)) {
            (Mode::Ready, Some(p)) => p,
            _ => return Err(SimError::OutsideCalibratedSubspace(ket.to_string())),
        };
        let i = composite_index(
            a.mode.index().expect("path"),
            pointer.index().expect("path"),
        );
        out[i] += amp;
    }
    StateVector::composite(out)
}

/// Applies each `(subsystem, U)` in order to a state over the composite basis.
pub fn propagate(state: &StateVector, unitaries: &[(Subsystem, CMatrix)]) -> Result<StateVector> {
    if !state.is_composite() {
        return Err(SimError::DimensionMismatch {
            expected: 4,
            got: state.dim(),
        });
    }
    let mut amps: [Complex64; 4] = state
        .amplitudes()
        .try_into()
        .expect("composite basis has four kets");
    for (subsystem, u) in unitaries {
        if u.dim() != 2 {
            return Err(SimError::DimensionMismatch {
                expected: 2,
                got: u.dim(),
            });
        }
        let mut next = [ZERO; 4];
        for a in 0..2 {
            for b in 0..2 {
                let src = amps[composite_index(a, b)];
                for k in 0..2 {
                    let dst = match subsystem {
                        Subsystem::A => composite_index(k, b),
                        Subsystem::B => composite_index(a, k),
                    };
                    let col = match subsystem {
                        Subsystem::A => a,
                        Subsystem::B => b,
                    };
                    next[dst] += u[(k, col)] * src;
                }
            }
        }
        amps = next;
    }
    let out = StateVector::composite(amps)?;
    debug_assert!((out.norm_sqr() - state.norm_sqr()).abs() < TOL);
    Ok(out)
}

/// Element matrices of `c`, photon A first, in the order the beams meet them.
pub fn circuit_unitaries(c: &RtoCircuit) -> Vec<(Subsystem, CMatrix)> {
    [Subsystem::A, Subsystem::B]
        .into_iter()
        .flat_map(|s| {
            c.elements(s)
                .into_iter()
                .map(move |e| (s, element_unitary(&e, &c.convention)))
        })
        .collect()
}

/// `P(Ai, Bj)` by propagating the source state through `c`'s element matrices.
pub fn oracle_probabilities(c: &RtoCircuit) -> [[f64; 2]; 2] {
    let out = propagate(&measurement_state(), &circuit_unitaries(c))
        .expect("composite source and 2x2 elements");
    let a = out.amplitudes();
    let mut p = [[0.0; 2]; 2];
    for (i, row) in p.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[composite_index(i, j)].norm_sqr();
        }
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceReport {
    pub subsystem: Subsystem,
    /// Largest off-diagonal modulus of the reduced density matrix.
    pub offdiag_magnitude: f64,
    pub purity: f64,
}

pub fn coherence_report(state: &StateVector, subsystem: Subsystem) -> Result<CoherenceReport> {
    let reduced = partial_trace(&outer(state)?, subsystem)?;
    Ok(CoherenceReport {
        subsystem,
        offdiag_magnitude: reduced.max_offdiag(),
        purity: reduced.purity(),
    })
}

/// Detection statistics of a composite state read out directly, with no
/// splitters in front of the detectors. Probabilities are `|a|² / ‖ψ‖²`, so
/// rounding in the stored amplitudes does not leak into the totals.
pub fn outcome_distribution(state: &StateVector) -> Result<CoincidenceTable> {
    if !state.is_composite() {
        return Err(SimError::DimensionMismatch {
            expected: 4,
            got: state.dim(),
        });
    }
    let a = state.amplitudes();
    let norm = state.norm_sqr();
    let mut p = [[0.0; 2]; 2];
    for (i, row) in p.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[composite_index(i, j)].norm_sqr() / norm;
        }
    }
    Ok(CoincidenceTable::from_probabilities(p, None))
}
