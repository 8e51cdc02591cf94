//! Complex linear algebra over the small labeled tensor-product spaces used by
//! the two-photon experiments: at most two subsystems (A and B), each with two
//! path modes, plus the formal `ready` mode of an unused detector.
//!
//! The composite basis order is fixed lexicographic everywhere:
//! `(A1B1, A1B2, A2B1, A2B2)`.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::error::{Result, SimError};

/// A probability amplitude.
pub type ComplexAmplitude = Complex64;

/// Tolerance for analytic identities (norms, traces, hermiticity).
pub const TOL: f64 = 1e-12;
/// Tolerance for eigenvalue nonnegativity.
pub const EIG_TOL: f64 = 1e-10;

pub(crate) const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Wraps a phase into `[0, 2π)`.
pub fn wrap_phase(phase: f64) -> f64 {
    let w = phase.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subsystem {
    A,
    B,
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subsystem::A => f.write_str("A"),
            Subsystem::B => f.write_str("B"),
        }
    }
}

/// Path mode of one subsystem. `Ready` is only used for a detector that has
/// not yet interacted with anything.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    One,
    Two,
    Ready,
}

impl Mode {
    /// Index into a two-mode amplitude pair. `None` for `Ready`.
    pub fn index(self) -> Option<usize> {
        match self {
            Mode::One => Some(0),
            Mode::Two => Some(1),
            Mode::Ready => None,
        }
    }

    pub fn from_index(i: usize) -> Option<Mode> {
        match i {
            0 => Some(Mode::One),
            1 => Some(Mode::Two),
            _ => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::One => f.write_str("1"),
            Mode::Two => f.write_str("2"),
            Mode::Ready => f.write_str("ready"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisLabel {
    pub subsystem: Subsystem,
    pub mode: Mode,
}

impl BasisLabel {
    pub const A1: BasisLabel = BasisLabel::new(Subsystem::A, Mode::One);
    pub const A2: BasisLabel = BasisLabel::new(Subsystem::A, Mode::Two);
    pub const B1: BasisLabel = BasisLabel::new(Subsystem::B, Mode::One);
    pub const B2: BasisLabel = BasisLabel::new(Subsystem::B, Mode::Two);
    pub const B_READY: BasisLabel = BasisLabel::new(Subsystem::B, Mode::Ready);

    pub const fn new(subsystem: Subsystem, mode: Mode) -> Self {
        Self { subsystem, mode }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.subsystem, self.mode)
    }
}

/// A product ket: one label per tensor factor, in factor order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState(Vec<BasisLabel>);

impl BasisState {
    pub fn new(labels: Vec<BasisLabel>) -> Self {
        Self(labels)
    }

    pub fn single(label: BasisLabel) -> Self {
        Self(vec![label])
    }

    pub fn pair(a: BasisLabel, b: BasisLabel) -> Self {
        Self(vec![a, b])
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.0
    }

    pub fn subsystems(&self) -> impl Iterator<Item = Subsystem> + '_ {
        self.0.iter().map(|l| l.subsystem)
    }

    /// The label this ket carries for `subsystem`, if any.
    pub fn label_for(&self, subsystem: Subsystem) -> Option<BasisLabel> {
        self.0.iter().copied().find(|l| l.subsystem == subsystem)
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// The two basis kets of one subsystem.
pub fn single_basis(subsystem: Subsystem) -> Vec<BasisState> {
    [Mode::One, Mode::Two]
        .into_iter()
        .map(|m| BasisState::single(BasisLabel::new(subsystem, m)))
        .collect()
}

/// The composite basis `(A1B1, A1B2, A2B1, A2B2)`.
pub fn composite_basis() -> Vec<BasisState> {
    let mut out = Vec::with_capacity(4);
    for a in [Mode::One, Mode::Two] {
        for b in [Mode::One, Mode::Two] {
            out.push(BasisState::pair(
                BasisLabel::new(Subsystem::A, a),
                BasisLabel::new(Subsystem::B, b),
            ));
        }
    }
    out
}

/// Index of `(a_mode, b_mode)` in the composite basis.
pub fn composite_index(a_mode: usize, b_mode: usize) -> usize {
    2 * a_mode + b_mode
}

/// A normalized state over a labeled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    basis: Vec<BasisState>,
    amplitudes: Vec<ComplexAmplitude>,
}

impl StateVector {
    /// Validates label distinctness, a consistent factor order and the unit norm.
    pub fn new(basis: Vec<BasisState>, amplitudes: Vec<ComplexAmplitude>) -> Result<Self> {
        if basis.len() != amplitudes.len() {
            return Err(SimError::LengthMismatch {
                basis: basis.len(),
                amplitudes: amplitudes.len(),
            });
        }
        if basis.is_empty() {
            return Err(SimError::NotNormalized(0.0));
        }
        let factors: Vec<Subsystem> = basis[0].subsystems().collect();
        for (i, ket) in basis.iter().enumerate() {
            if !ket.subsystems().eq(factors.iter().copied()) {
                return Err(SimError::NotProductBasis(format!(
                    "ket {ket} does not follow factor order {factors:?}"
                )));
            }
            if basis[..i].contains(ket) {
                return Err(SimError::DuplicateLabel(ket.to_string()));
            }
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > TOL {
            return Err(SimError::NotNormalized(norm));
        }
        Ok(Self { basis, amplitudes })
    }

    /// Like [`StateVector::new`] but rescales the amplitudes to unit norm first.
    pub fn normalized(basis: Vec<BasisState>, amplitudes: Vec<ComplexAmplitude>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(SimError::NotNormalized(norm * norm));
        }
        Self::new(basis, amplitudes.into_iter().map(|a| a / norm).collect())
    }

    /// `a1|S1⟩ + a2|S2⟩` for one subsystem.
    pub fn single(subsystem: Subsystem, amplitudes: [ComplexAmplitude; 2]) -> Result<Self> {
        Self::new(single_basis(subsystem), amplitudes.to_vec())
    }

    /// A two-mode basis ket such as `|A1⟩`.
    pub fn basis_ket(label: BasisLabel) -> Result<Self> {
        let i = label.mode.index().ok_or_else(|| {
            SimError::OutsideCalibratedSubspace(format!("{label} is not a path mode"))
        })?;
        let mut amps = [ZERO; 2];
        amps[i] = ONE;
        Self::single(label.subsystem, amps)
    }

    /// Amplitudes over `(A1B1, A1B2, A2B1, A2B2)`.
    pub fn composite(amplitudes: [ComplexAmplitude; 4]) -> Result<Self> {
        Self::new(composite_basis(), amplitudes.to_vec())
    }

    /// The detector's pre-measurement state `|ready⟩`.
    pub fn ready() -> Self {
        Self {
            basis: vec![BasisState::single(BasisLabel::B_READY)],
            amplitudes: vec![ONE],
        }
    }

    pub fn basis(&self) -> &[BasisState] {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[ComplexAmplitude] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Tensor factors in order.
    pub fn subsystems(&self) -> Vec<Subsystem> {
        self.basis[0].subsystems().collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn amplitude_of(&self, ket: &BasisState) -> Option<ComplexAmplitude> {
        self.basis
            .iter()
            .position(|k| k == ket)
            .map(|i| self.amplitudes[i])
    }

    /// `⟨self|other⟩`; both states must share the same basis.
    pub fn inner(&self, other: &StateVector) -> Result<ComplexAmplitude> {
        if self.basis != other.basis {
            return Err(SimError::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// True when the basis is exactly the canonical composite basis.
    pub fn is_composite(&self) -> bool {
        self.basis == composite_basis()
    }
}

/// Tensor product of states over disjoint subsystems. The result's basis is the
/// ordered product of both bases.
pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    let sa = a.subsystems();
    if let Some(s) = b.subsystems().into_iter().find(|s| sa.contains(s)) {
        return Err(SimError::SubsystemOverlap(s));
    }
    let mut basis = Vec::with_capacity(a.dim() * b.dim());
    let mut amps = Vec::with_capacity(a.dim() * b.dim());
    for (ka, xa) in a.basis.iter().zip(&a.amplitudes) {
        for (kb, xb) in b.basis.iter().zip(&b.amplitudes) {
            let mut labels = ka.labels().to_vec();
            labels.extend_from_slice(kb.labels());
            basis.push(BasisState::new(labels));
            amps.push(xa * xb);
        }
    }
    StateVector::new(basis, amps)
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(SimError::DimensionMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.n, other.n, "matrix dimensions differ");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self * &self.adjoint()).max_abs_diff(&Self::identity(self.n)) <= tol
    }

    /// Eigenvalues of a Hermitian matrix in ascending order. Uses the closed
    /// form for 2×2 and cyclic complex Jacobi rotations otherwise.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let mut ev = if self.n == 2 {
            let a = self[(0, 0)].re;
            let d = self[(1, 1)].re;
            let b = self[(0, 1)];
            let mean = 0.5 * (a + d);
            let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            vec![mean - r, mean + r]
        } else {
            jacobi_eigenvalues(self)
        };
        ev.sort_by(f64::total_cmp);
        ev
    }
}

fn off_diagonal_norm(m: &CMatrix) -> f64 {
    let mut s = 0.0;
    for i in 0..m.n {
        for j in 0..m.n {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let n = m.n;
    let mut a = m.clone();
    let scale = a
        .data
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    for _sweep in 0..64 {
        if off_diagonal_norm(&a) <= 1e-16 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                // Phase rotation making a[p][q] real, then a real Jacobi rotation.
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let mut j = CMatrix::identity(n);
                j[(p, p)] = Complex64::new(c, 0.0);
                j[(p, q)] = Complex64::new(s, 0.0);
                j[(q, p)] = -phase.conj() * s;
                j[(q, q)] = phase.conj() * c;
                a = &(&j.adjoint() * &a) * &j;
            }
        }
    }
    (0..n).map(|i| a[(i, i)].re).collect()
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimensions differ");
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let x = self[(i, k)];
                for j in 0..n {
                    out[(i, j)] += x * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// Hermitian, positive-semidefinite, unit-trace matrix over a labeled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    basis: Vec<BasisState>,
    entries: CMatrix,
}

impl DensityMatrix {
    pub fn new(basis: Vec<BasisState>, entries: CMatrix) -> Result<Self> {
        if basis.len() != entries.dim() {
            return Err(SimError::DimensionMismatch {
                expected: basis.len(),
                got: entries.dim(),
            });
        }
        if !entries.is_hermitian(TOL) {
            return Err(SimError::InvalidDensityMatrix("not Hermitian".into()));
        }
        let tr = entries.trace();
        if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
            return Err(SimError::InvalidDensityMatrix(format!("trace {tr}")));
        }
        if let Some(&min) = entries.hermitian_eigenvalues().first() {
            if min < -EIG_TOL {
                return Err(SimError::InvalidDensityMatrix(format!(
                    "negative eigenvalue {min}"
                )));
            }
        }
        Ok(Self { basis, entries })
    }

    pub fn basis(&self) -> &[BasisState] {
        &self.basis
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// `tr(ρ²)`
    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries).trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.entries.hermitian_eigenvalues()
    }

    /// Largest off-diagonal modulus.
    pub fn max_offdiag(&self) -> f64 {
        let n = self.dim();
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m = m.max(self.entries[(i, j)].norm());
                }
            }
        }
        m
    }
}

impl Index<(usize, usize)> for DensityMatrix {
    type Output = Complex64;
    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.entries[idx]
    }
}

/// `|ψ⟩⟨ψ|`
pub fn outer(sv: &StateVector) -> Result<DensityMatrix> {
    let norm = sv.norm_sqr();
    if (norm - 1.0).abs() > TOL {
        return Err(SimError::NotNormalized(norm));
    }
    let n = sv.dim();
    let mut m = CMatrix::zeros(n);
    for j in 0..n {
        for k in 0..n {
            m[(j, k)] = sv.amplitudes[j] * sv.amplitudes[k].conj();
        }
    }
    DensityMatrix::new(sv.basis.clone(), m)
}

/// Reduced density matrix of `keep`, tracing out the other tensor factor.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> Result<DensityMatrix> {
    let factors: Vec<Subsystem> = rho.basis[0].subsystems().collect();
    if !factors.contains(&keep) {
        return Err(SimError::UnknownSubsystem(keep));
    }
    if factors.len() != 2 {
        return Err(SimError::NotProductBasis(
            "partial trace needs a two-factor basis".into(),
        ));
    }
    let traced = factors
        .iter()
        .copied()
        .find(|&s| s != keep)
        .expect("two factors");

    let mut kept_labels: Vec<BasisLabel> = Vec::new();
    let mut traced_labels: Vec<BasisLabel> = Vec::new();
    for ket in &rho.basis {
        let k = ket.label_for(keep).expect("factor present");
        let t = ket.label_for(traced).expect("factor present");
        if !kept_labels.contains(&k) {
            kept_labels.push(k);
        }
        if !traced_labels.contains(&t) {
            traced_labels.push(t);
        }
    }
    if kept_labels.len() * traced_labels.len() != rho.dim() {
        return Err(SimError::NotProductBasis(format!(
            "{} kets do not span {}x{} product",
            rho.dim(),
            kept_labels.len(),
            traced_labels.len()
        )));
    }

    // index[k][t] = position of ket (k, t) in rho's basis
    let mut index = vec![vec![0usize; traced_labels.len()]; kept_labels.len()];
    for (pos, ket) in rho.basis.iter().enumerate() {
        let k = ket.label_for(keep).expect("factor present");
        let t = ket.label_for(traced).expect("factor present");
        let ki = kept_labels.iter().position(|&l| l == k).expect("collected");
        let ti = traced_labels
            .iter()
            .position(|&l| l == t)
            .expect("collected");
        index[ki][ti] = pos;
    }

    let nk = kept_labels.len();
    let mut reduced = CMatrix::zeros(nk);
    for i in 0..nk {
        for j in 0..nk {
            reduced[(i, j)] = (0..traced_labels.len())
                .map(|t| rho.entries[(index[i][t], index[j][t])])
                .sum();
        }
    }
    let basis = kept_labels.into_iter().map(BasisState::single).collect();
    DensityMatrix::new(basis, reduced)
}
