//! The two interferometer topologies: a single-photon Mach–Zehnder
//! interferometer and the two-photon dual interferometer, evaluated by
//! summing one amplitude per optical path.
//!
//! In the two-photon circuit each photon has two beams, solid (mode 1) and
//! dashed (mode 2), which meet at that photon's beam splitter. A solid beam
//! is transmitted to detector 1 and reflected to detector 2; a dashed beam
//! the other way round. `φ_B` sits on B's solid beam and `φ_A` on A's dashed
//! beam, so every detection amplitude is a sum of an `e^{iφ_B}` term and an
//! `e^{iφ_A}` term.
//!
//! B's solid beam also carries a fixed compensating plate of phase
//! `arg(r²/t²)` (π for any lossless symmetric splitter). It sets the zero of
//! the phase dial so that `φ_B − φ_A = 0` is the perfectly correlated
//! setting under every convention.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Result, SimError};
use crate::linalg::{wrap_phase, ComplexAmplitude, Mode, Subsystem, ZERO};
use crate::optics::{
    accumulate_path_phase, element_unitary, OpticalElement, PathStep, PhaseConvention, Port,
};

/// Weight of each branch in the source state `(|A1⟩|B1⟩ + |A2⟩|B2⟩)/√2`.
pub const SOURCE_WEIGHT: f64 = FRAC_1_SQRT_2;

fn check_finite(phase: f64) -> Result<f64> {
    if phase.is_finite() {
        Ok(phase)
    } else {
        Err(SimError::NonFinitePhase(phase))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MziCircuit {
    pub phi1: f64,
    pub phi2: f64,
    pub bs2_present: bool,
    pub convention: PhaseConvention,
}

impl MziCircuit {
    pub fn new(phi1: f64, phi2: f64, bs2_present: bool) -> Result<Self> {
        Self::with_convention(phi1, phi2, bs2_present, PhaseConvention::default())
    }

    pub fn with_convention(
        phi1: f64,
        phi2: f64,
        bs2_present: bool,
        convention: PhaseConvention,
    ) -> Result<Self> {
        convention.validate()?;
        Ok(Self {
            phi1: check_finite(phi1)?,
            phi2: check_finite(phi2)?,
            bs2_present,
            convention,
        })
    }

    /// `φ₂ − φ₁` wrapped to `[0, 2π)`.
    pub fn phase_difference(&self) -> f64 {
        wrap_phase(self.phi2 - self.phi1)
    }
}

/// Detection probabilities `(P(B1), P(B2))`.
///
/// The photon enters BS1 so that its reflected part travels path 1 and its
/// transmitted part path 2. Each path bounces off one mirror and crosses its
/// phase shifter; BS2, when present, recombines them. Without BS2 the
/// detectors sit directly on paths 1 and 2.
pub fn mzi_probabilities(c: &MziCircuit) -> (f64, f64) {
    let conv = &c.convention;
    let bs = element_unitary(&OpticalElement::BeamSplitter5050, conv);
    // input port 2: column 2 of the splitter matrix
    let mut amps = [bs[(0, 1)], bs[(1, 1)]];
    let mut stages = vec![
        OpticalElement::Mirror { swap: false },
        OpticalElement::PhaseShifter {
            shift: c.phi1,
            mode: Mode::One,
        },
        OpticalElement::PhaseShifter {
            shift: c.phi2,
            mode: Mode::Two,
        },
    ];
    if c.bs2_present {
        stages.push(OpticalElement::BeamSplitter5050);
    }
    for e in &stages {
        let u = element_unitary(e, conv);
        amps = [
            u[(0, 0)] * amps[0] + u[(0, 1)] * amps[1],
            u[(1, 0)] * amps[0] + u[(1, 1)] * amps[1],
        ];
    }
    (amps[0].norm_sqr(), amps[1].norm_sqr())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RtoCircuit {
    pub phi_a: f64,
    pub phi_b: f64,
    pub convention: PhaseConvention,
}

impl RtoCircuit {
    pub fn new(phi_a: f64, phi_b: f64) -> Result<Self> {
        Self::with_convention(phi_a, phi_b, PhaseConvention::default())
    }

    pub fn with_convention(phi_a: f64, phi_b: f64, convention: PhaseConvention) -> Result<Self> {
        convention.validate()?;
        Ok(Self {
            phi_a: check_finite(phi_a)?,
            phi_b: check_finite(phi_b)?,
            convention,
        })
    }

    /// `φ_B − φ_A`, unwrapped.
    pub fn phase_difference(&self) -> f64 {
        self.phi_b - self.phi_a
    }

    /// Phase of the fixed plate on B's solid beam.
    pub fn compensator_phase(&self) -> f64 {
        let r = self.convention.reflection();
        let t = self.convention.transmission();
        ((r * r) / (t * t)).arg()
    }

    /// Elements met by `photon`'s two beams before detection, as 2×2 actions
    /// on its (solid, dashed) modes.
    pub fn elements(&self, photon: Subsystem) -> Vec<OpticalElement> {
        match photon {
            Subsystem::A => vec![
                OpticalElement::Mirror { swap: false },
                OpticalElement::PhaseShifter {
                    shift: self.phi_a,
                    mode: Mode::Two,
                },
                OpticalElement::BeamSplitter5050,
            ],
            Subsystem::B => vec![
                OpticalElement::Mirror { swap: false },
                OpticalElement::PhaseShifter {
                    shift: self.phi_b,
                    mode: Mode::One,
                },
                OpticalElement::PhaseShifter {
                    shift: self.compensator_phase(),
                    mode: Mode::One,
                },
                OpticalElement::BeamSplitter5050,
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DetectorPair {
    pub a: Mode,
    pub b: Mode,
}

impl DetectorPair {
    pub const A1B1: DetectorPair = DetectorPair {
        a: Mode::One,
        b: Mode::One,
    };
    pub const A1B2: DetectorPair = DetectorPair {
        a: Mode::One,
        b: Mode::Two,
    };
    pub const A2B1: DetectorPair = DetectorPair {
        a: Mode::Two,
        b: Mode::One,
    };
    pub const A2B2: DetectorPair = DetectorPair {
        a: Mode::Two,
        b: Mode::Two,
    };
    pub const ALL: [DetectorPair; 4] = [Self::A1B1, Self::A1B2, Self::A2B1, Self::A2B2];

    /// Detector indices are 1 or 2.
    pub fn new(a: u8, b: u8) -> Result<Self> {
        let mode = |i: u8| match i {
            1 => Some(Mode::One),
            2 => Some(Mode::Two),
            _ => None,
        };
        match (mode(a), mode(b)) {
            (Some(a), Some(b)) => Ok(Self { a, b }),
            _ => Err(SimError::InvalidDetectorPair(a, b)),
        }
    }

    /// Zero-based `(i, j)` for indexing 2×2 tables.
    pub fn indices(&self) -> (usize, usize) {
        (
            self.a.index().expect("path mode"),
            self.b.index().expect("path mode"),
        )
    }

    pub fn is_same(&self) -> bool {
        self.a == self.b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Solid,
    Dashed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonStep {
    pub photon: Subsystem,
    pub step: PathStep,
}

/// One source-to-detectors route of the photon pair.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalPath {
    pub detector_pair: DetectorPair,
    pub branch: Branch,
    pub steps: Vec<PhotonStep>,
}

impl OpticalPath {
    /// Port used at `photon`'s splitter, if the path crosses one.
    pub fn port(&self, photon: Subsystem) -> Option<Port> {
        self.steps.iter().find_map(|s| match s.step {
            PathStep::BeamSplitter(p) if s.photon == photon => Some(p),
            _ => None,
        })
    }

    /// Product of all step factors, without the source weight.
    pub fn amplitude(&self, conv: &PhaseConvention) -> Result<ComplexAmplitude> {
        accumulate_path_phase(self.steps.iter().map(|s| s.step), conv)
    }
}

fn port_to(branch: Branch, detector: Mode) -> Port {
    match (branch, detector) {
        (Branch::Solid, Mode::One) | (Branch::Dashed, Mode::Two) => Port::Transmit,
        _ => Port::Reflect,
    }
}

/// The solid and dashed paths ending at `pair`.
pub fn enumerate_paths(c: &RtoCircuit, pair: DetectorPair) -> Result<Vec<OpticalPath>> {
    if pair.a.index().is_none() || pair.b.index().is_none() {
        return Err(SimError::InvalidDetectorPair(
            pair.a.index().map_or(0, |i| i as u8 + 1),
            pair.b.index().map_or(0, |i| i as u8 + 1),
        ));
    }
    let step = |photon, step| PhotonStep { photon, step };
    let solid = OpticalPath {
        detector_pair: pair,
        branch: Branch::Solid,
        steps: vec![
            step(Subsystem::A, PathStep::Mirror),
            step(
                Subsystem::A,
                PathStep::BeamSplitter(port_to(Branch::Solid, pair.a)),
            ),
            step(Subsystem::B, PathStep::Mirror),
            step(Subsystem::B, PathStep::PhaseShifter(c.phi_b)),
            step(Subsystem::B, PathStep::PhaseShifter(c.compensator_phase())),
            step(
                Subsystem::B,
                PathStep::BeamSplitter(port_to(Branch::Solid, pair.b)),
            ),
        ],
    };
    let dashed = OpticalPath {
        detector_pair: pair,
        branch: Branch::Dashed,
        steps: vec![
            step(Subsystem::A, PathStep::Mirror),
            step(Subsystem::A, PathStep::PhaseShifter(c.phi_a)),
            step(
                Subsystem::A,
                PathStep::BeamSplitter(port_to(Branch::Dashed, pair.a)),
            ),
            step(Subsystem::B, PathStep::Mirror),
            step(
                Subsystem::B,
                PathStep::BeamSplitter(port_to(Branch::Dashed, pair.b)),
            ),
        ],
    };
    Ok(vec![solid, dashed])
}

/// Two-point amplitude at `pair`: source weight times the sum over both paths.
pub fn coincidence_amplitude(c: &RtoCircuit, pair: DetectorPair) -> Result<ComplexAmplitude> {
    let mut total = ZERO;
    for path in enumerate_paths(c, pair)? {
        total += path.amplitude(&c.convention)?;
    }
    Ok(total * Complex64::new(SOURCE_WEIGHT, 0.0))
}

/// `P(Ai, Bj)` from the path sum, indexed `[i][j]`.
pub fn coincidence_probabilities(c: &RtoCircuit) -> [[f64; 2]; 2] {
    let mut p = [[0.0; 2]; 2];
    for pair in DetectorPair::ALL {
        let (i, j) = pair.indices();
        p[i][j] = coincidence_amplitude(c, pair)
            .expect("fixed detector pairs are valid")
            .norm_sqr();
    }
    p
}
