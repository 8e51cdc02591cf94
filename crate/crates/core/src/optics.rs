//! Lossless optical elements acting on the two path modes of one photon.
//!
//! A 50/50 beam splitter under convention `(r, t)` acts on `(mode 1, mode 2)`
//! amplitudes as `(1/√2)·[[e^{it}, e^{ir}], [e^{ir}, e^{it}]]`: a photon keeps
//! its mode index when transmitted and swaps it when reflected. The matrix is
//! unitary exactly when `r − t ≡ π/2 (mod π)`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Result, SimError};
use crate::linalg::{wrap_phase, CMatrix, ComplexAmplitude, Mode, ONE, ZERO};

/// Fixed phases picked up at reflections, transmissions and mirror bounces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseConvention {
    pub bs_reflection_phase: f64,
    pub bs_transmission_phase: f64,
    pub mirror_phase: f64,
}

impl Default for PhaseConvention {
    /// Symmetric splitter: reflection `π/2`, transmission `0`, mirror `π`.
    fn default() -> Self {
        Self {
            bs_reflection_phase: FRAC_PI_2,
            bs_transmission_phase: 0.0,
            mirror_phase: PI,
        }
    }
}

impl PhaseConvention {
    pub fn new(bs_reflection_phase: f64, bs_transmission_phase: f64, mirror_phase: f64) -> Self {
        Self {
            bs_reflection_phase,
            bs_transmission_phase,
            mirror_phase,
        }
    }

    /// Amplitude factor for one transmission through a 50/50 splitter.
    pub fn transmission(&self) -> ComplexAmplitude {
        Complex64::from_polar(FRAC_1_SQRT_2, self.bs_transmission_phase)
    }

    /// Amplitude factor for one reflection off a 50/50 splitter.
    pub fn reflection(&self) -> ComplexAmplitude {
        Complex64::from_polar(FRAC_1_SQRT_2, self.bs_reflection_phase)
    }

    pub fn mirror(&self) -> ComplexAmplitude {
        Complex64::from_polar(1.0, self.mirror_phase)
    }

    pub fn beam_splitter(&self) -> CMatrix {
        let t = self.transmission();
        let r = self.reflection();
        CMatrix::from_rows(&[vec![t, r], vec![r, t]]).expect("2x2")
    }

    pub fn is_unitary(&self) -> bool {
        self.bs_reflection_phase.is_finite()
            && self.bs_transmission_phase.is_finite()
            && self.mirror_phase.is_finite()
            && self.beam_splitter().is_unitary(1e-12)
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_unitary() {
            Ok(())
        } else {
            Err(SimError::NonUnitaryConvention(wrap_phase(
                self.bs_reflection_phase - self.bs_transmission_phase,
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OpticalElement {
    BeamSplitter5050,
    /// A mirror bounce on both modes; `swap` exchanges the mode labels.
    Mirror {
        swap: bool,
    },
    /// Multiplies the amplitude in `mode` by `e^{i·shift}`.
    PhaseShifter {
        shift: f64,
        mode: Mode,
    },
}

/// The 2×2 unitary of `element` on `(mode 1, mode 2)` amplitudes.
pub fn element_unitary(element: &OpticalElement, conv: &PhaseConvention) -> CMatrix {
    match *element {
        OpticalElement::BeamSplitter5050 => conv.beam_splitter(),
        OpticalElement::Mirror { swap } => {
            let m = conv.mirror();
            let rows = if swap {
                [vec![ZERO, m], vec![m, ZERO]]
            } else {
                [vec![m, ZERO], vec![ZERO, m]]
            };
            CMatrix::from_rows(&rows).expect("2x2")
        }
        OpticalElement::PhaseShifter { shift, mode } => {
            let e = Complex64::from_polar(1.0, shift);
            let rows = match mode {
                Mode::Two => [vec![ONE, ZERO], vec![ZERO, e]],
                // Ready is not a path mode; treat the shifter as sitting on mode 1.
                Mode::One | Mode::Ready => [vec![e, ZERO], vec![ZERO, ONE]],
            };
            CMatrix::from_rows(&rows).expect("2x2")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Port {
    Transmit,
    Reflect,
}

/// One traversal along an optical path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathStep {
    Mirror,
    PhaseShifter(f64),
    BeamSplitter(Port),
}

impl PathStep {
    pub fn factor(&self, conv: &PhaseConvention) -> ComplexAmplitude {
        match *self {
            PathStep::Mirror => conv.mirror(),
            PathStep::PhaseShifter(phi) => Complex64::from_polar(1.0, phi),
            PathStep::BeamSplitter(Port::Transmit) => conv.transmission(),
            PathStep::BeamSplitter(Port::Reflect) => conv.reflection(),
        }
    }
}

/// Product of the per-step amplitude factors along a path.
pub fn accumulate_path_phase<I>(steps: I, conv: &PhaseConvention) -> Result<ComplexAmplitude>
where
    I: IntoIterator<Item = PathStep>,
{
    let mut steps = steps.into_iter().peekable();
    if steps.peek().is_none() {
        return Err(SimError::EmptyPath);
    }
    Ok(steps.fold(ONE, |acc, s| acc * s.factor(conv)))
}
