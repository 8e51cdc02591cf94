//! Coincidence tables, correlation sweeps, phase-offset extraction, CHSH and
//! the single-photon versus entangled-pair comparison table. Everything here
//! is computed from the path-sum engine in [`crate::circuits`].

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use rayon::prelude::*;

use crate::circuits::{coincidence_probabilities, mzi_probabilities, MziCircuit, RtoCircuit};
use crate::error::{Result, SimError};
use crate::linalg::wrap_phase;
use crate::optics::PhaseConvention;

/// Default sweep resolution on `[0, π]`.
pub const DEFAULT_GRID_POINTS: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Marginals {
    /// `[P(A1), P(A2)]`
    pub a: [f64; 2],
    /// `[P(B1), P(B2)]`
    pub b: [f64; 2],
}

impl Marginals {
    /// Largest distance of any single-detector probability from 1/2.
    pub fn max_deviation_from_half(&self) -> f64 {
        self.a
            .iter()
            .chain(&self.b)
            .map(|p| (p - 0.5).abs())
            .fold(0.0, f64::max)
    }
}

/// Joint detection probabilities and the statistics derived from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoincidenceTable {
    /// `(φ_A, φ_B)` when the table comes from a circuit.
    pub phases: Option<(f64, f64)>,
    /// `p[i][j] = P(A(i+1), B(j+1))`
    pub p: [[f64; 2]; 2],
    pub marginals: Marginals,
    pub p_same: f64,
    pub p_diff: f64,
    pub correlation: f64,
}

impl CoincidenceTable {
    pub fn from_probabilities(p: [[f64; 2]; 2], phases: Option<(f64, f64)>) -> Self {
        let marginals = Marginals {
            a: [p[0][0] + p[0][1], p[1][0] + p[1][1]],
            b: [p[0][0] + p[1][0], p[0][1] + p[1][1]],
        };
        let p_same = p[0][0] + p[1][1];
        let p_diff = p[0][1] + p[1][0];
        Self {
            phases,
            p,
            marginals,
            p_same,
            p_diff,
            correlation: p_same - p_diff,
        }
    }

    pub fn total(&self) -> f64 {
        self.p.iter().flatten().sum()
    }
}

pub fn coincidence_table(c: &RtoCircuit) -> CoincidenceTable {
    CoincidenceTable::from_probabilities(coincidence_probabilities(c), Some((c.phi_a, c.phi_b)))
}

/// `n` evenly spaced points on `[0, π]`, both endpoints included.
pub fn uniform_grid(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(SimError::InvalidGrid(format!(
            "need at least 2 points, got {n}"
        )));
    }
    let step = PI / (n - 1) as f64;
    Ok((0..n)
        .map(|k| if k == n - 1 { PI } else { k as f64 * step })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Phase differences `φ_B − φ_A`.
    pub grid: Vec<f64>,
    pub rows: Vec<CoincidenceTable>,
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(SimError::EmptyGrid);
    }
    if let Some(x) = grid.iter().find(|x| !(0.0..=PI).contains(*x)) {
        return Err(SimError::InvalidGrid(format!("{x} outside [0, pi]")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SimError::InvalidGrid("not strictly increasing".into()));
    }
    Ok(())
}

/// Sweep of `φ_B − φ_A` over `grid` with `φ_A = 0`.
pub fn correlation_curve(grid: &[f64], conv: &PhaseConvention) -> Result<SweepResult> {
    correlation_curve_at(grid, 0.0, conv)
}

/// Sweep with A's shifter held at `phi_a` and `φ_B = phi_a + grid[k]`.
pub fn correlation_curve_at(
    grid: &[f64],
    phi_a: f64,
    conv: &PhaseConvention,
) -> Result<SweepResult> {
    validate_grid(grid)?;
    let circuits = grid
        .iter()
        .map(|&d| RtoCircuit::with_convention(phi_a, phi_a + d, *conv))
        .collect::<Result<Vec<_>>>()?;
    let rows = circuits.par_iter().map(coincidence_table).collect();
    Ok(SweepResult {
        grid: grid.to_vec(),
        rows,
    })
}

/// Constant offsets of `P(A1,B1) = [1 + cos(Δ + u)]/4` and
/// `P(A1,B2) = [1 + cos(Δ + v)]/4`, all wrapped to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseOffsets {
    pub u: f64,
    pub v: f64,
    pub difference: f64,
}

/// Offset of a fringe `[1 + cos(Δ + c)]/4` from its values at `Δ = 0` and
/// `Δ = π/2`. Offsets within 1e-12 below 2π are reported as 0.
pub fn fringe_offset(p_at_zero: f64, p_at_quarter: f64) -> f64 {
    let cos_c = 4.0 * p_at_zero - 1.0;
    let sin_c = -(4.0 * p_at_quarter - 1.0);
    let c = wrap_phase(sin_c.atan2(cos_c));
    if TAU - c < 1e-12 {
        0.0
    } else {
        c
    }
}

pub fn phase_offset_check(conv: &PhaseConvention) -> Result<PhaseOffsets> {
    conv.validate()?;
    let p0 = coincidence_probabilities(&RtoCircuit::with_convention(0.0, 0.0, *conv)?);
    let p1 = coincidence_probabilities(&RtoCircuit::with_convention(0.0, FRAC_PI_2, *conv)?);
    let u = fringe_offset(p0[0][0], p1[0][0]);
    let v = fringe_offset(p0[0][1], p1[0][1]);
    Ok(PhaseOffsets {
        u,
        v,
        difference: wrap_phase(v - u),
    })
}

/// Analyzer settings `(a, a′, b, b′)` as phase-shifter angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSettings {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl ChshSettings {
    /// Settings attaining `2√2`.
    pub const OPTIMAL: ChshSettings = ChshSettings {
        a: 0.0,
        a_prime: FRAC_PI_2,
        b: FRAC_PI_4,
        b_prime: 3.0 * FRAC_PI_4,
    };

    pub fn new(a: f64, a_prime: f64, b: f64, b_prime: f64) -> Self {
        Self {
            a,
            a_prime,
            b,
            b_prime,
        }
    }

    /// `(φ_A, φ_B)` pairs with their CHSH signs, in the order
    /// `E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)`.
    pub fn terms(&self) -> [((f64, f64), f64); 4] {
        [
            ((self.a, self.b), 1.0),
            ((self.a, self.b_prime), -1.0),
            ((self.a_prime, self.b), 1.0),
            ((self.a_prime, self.b_prime), 1.0),
        ]
    }
}

/// Engine correlation `E(φ_A, φ_B)`.
pub fn correlation_at(phi_a: f64, phi_b: f64, conv: &PhaseConvention) -> Result<f64> {
    Ok(coincidence_table(&RtoCircuit::with_convention(phi_a, phi_b, *conv)?).correlation)
}

/// `S = |E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)|` from simulated correlations.
pub fn chsh_value(settings: &ChshSettings, conv: &PhaseConvention) -> Result<f64> {
    let mut s = 0.0;
    for ((pa, pb), sign) in settings.terms() {
        s += sign * correlation_at(pa, pb, conv)?;
    }
    Ok(s.abs())
}

/// Phases of the comparison table.
pub const COMPARISON_PHASES: [f64; 5] = [0.0, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4, PI];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub phase: f64,
    /// Single photon: `P(B1)`, `P(B2)` with the second splitter in place.
    pub mzi_p1: f64,
    pub mzi_p2: f64,
    /// Photon pair: `P(A1)`; every single-detector probability of the pair.
    pub rto_marginal: f64,
    pub marginal_max_deviation: f64,
    pub p_same: f64,
    pub p_diff: f64,
    pub correlation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub notes: Vec<String>,
}

/// Single-photon fringe versus pair statistics at each of `phases`.
pub fn comparison_table(phases: &[f64], conv: &PhaseConvention) -> Result<ComparisonReport> {
    let mut rows = Vec::with_capacity(phases.len());
    for &phase in phases {
        let (mzi_p1, mzi_p2) =
            mzi_probabilities(&MziCircuit::with_convention(0.0, phase, true, *conv)?);
        let t = coincidence_table(&RtoCircuit::with_convention(0.0, phase, *conv)?);
        rows.push(ComparisonRow {
            phase,
            mzi_p1,
            mzi_p2,
            rto_marginal: t.marginals.a[0],
            marginal_max_deviation: t.marginals.max_deviation_from_half(),
            p_same: t.p_same,
            p_diff: t.p_diff,
            correlation: t.correlation,
        });
    }
    let mut notes = Vec::new();
    for r in &rows {
        let quarter =
            (r.phase - FRAC_PI_4).abs() < 1e-12 || (r.phase - 3.0 * FRAC_PI_4).abs() < 1e-12;
        if quarter {
            notes.push(format!(
                "phase {:.6}: a 71%/29% split quotes |correlation| = {:.6} as a percentage; \
                 the fringe gives mzi_p1 = {:.6} and p_same = {:.6}",
                r.phase,
                r.correlation.abs(),
                r.mzi_p1,
                r.p_same
            ));
        }
    }
    Ok(ComparisonReport { rows, notes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, SQRT_2};

    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn default_table(d: f64) -> CoincidenceTable {
        coincidence_table(&RtoCircuit::new(0.0, d).unwrap())
    }

    #[test]
    fn table_invariants_and_flat_marginals() {
        for d in [0.0, 0.4, FRAC_PI_2, 2.5, PI] {
            let t = default_table(d);
            assert_abs_diff_eq!(t.total(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(t.p_same + t.p_diff, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(t.correlation, t.p_same - t.p_diff, epsilon = 1e-12);
            assert!(t.marginals.max_deviation_from_half() < 1e-12);
        }
    }

    #[test]
    fn same_and_different_at_key_phases() {
        let t = default_table(0.0);
        assert_abs_diff_eq!(t.p_same, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.p_diff, 0.0, epsilon = 1e-12);
        let t = default_table(FRAC_PI_2);
        assert_abs_diff_eq!(t.p_same, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(t.p_diff, 0.5, epsilon = 1e-12);
        // (1 + cos π/3)/2 = 3/4
        let t = default_table(FRAC_PI_3);
        assert_abs_diff_eq!(t.p_same, 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(t.p_diff, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn every_cell_is_a_unit_quarter_fringe() {
        // Fit the offset of each cell from two samples, then check the fit on the sweep.
        let grid = uniform_grid(DEFAULT_GRID_POINTS).unwrap();
        let p0 = default_table(0.0).p;
        let p1 = default_table(FRAC_PI_2).p;
        let sweep = correlation_curve(&grid, &PhaseConvention::default()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let c = fringe_offset(p0[i][j], p1[i][j]);
                for (d, row) in grid.iter().zip(&sweep.rows) {
                    assert_abs_diff_eq!(row.p[i][j], (1.0 + (d + c).cos()) / 4.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn grid_validation() {
        let conv = PhaseConvention::default();
        assert_eq!(
            correlation_curve(&[], &conv).unwrap_err(),
            SimError::EmptyGrid
        );
        assert!(matches!(
            correlation_curve(&[0.0, 4.0], &conv),
            Err(SimError::InvalidGrid(_))
        ));
        assert!(matches!(
            correlation_curve(&[1.0, 0.5], &conv),
            Err(SimError::InvalidGrid(_))
        ));
        assert!(uniform_grid(1).is_err());
        let g = uniform_grid(101).unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[100], PI);
    }

    #[test]
    fn correlation_curve_points() {
        let conv = PhaseConvention::default();
        let s = correlation_curve(&[0.0, FRAC_PI_4, PI], &conv).unwrap();
        assert_abs_diff_eq!(s.rows[0].correlation, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.rows[1].correlation, 0.5f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(s.rows[2].correlation, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn offsets_default_and_altered() {
        let o = phase_offset_check(&PhaseConvention::default()).unwrap();
        assert_abs_diff_eq!(o.difference, PI, epsilon = 1e-10);
        let o = phase_offset_check(&PhaseConvention::new(FRAC_PI_2, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(o.difference, PI, epsilon = 1e-10);
        assert!(matches!(
            phase_offset_check(&PhaseConvention::new(0.0, 0.0, 0.0)),
            Err(SimError::NonUnitaryConvention(_))
        ));
    }

    #[test]
    fn offsets_random_conventions() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..20 {
            let t: f64 = rng.gen_range(0.0..TAU);
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            let conv = PhaseConvention::new(t + sign * FRAC_PI_2, t, rng.gen_range(0.0..TAU));
            let o = phase_offset_check(&conv).unwrap();
            assert_abs_diff_eq!(o.difference, PI, epsilon = 1e-10);
        }
    }

    #[test]
    fn chsh_known_values() {
        let conv = PhaseConvention::default();
        // √2/2 − (−√2/2) + √2/2 + √2/2
        assert_abs_diff_eq!(
            chsh_value(&ChshSettings::OPTIMAL, &conv).unwrap(),
            2.0 * SQRT_2,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            chsh_value(&ChshSettings::new(0.0, 0.0, 0.0, 0.0), &conv).unwrap(),
            2.0,
            epsilon = 1e-12
        );
        // every E(x, y) = cos(±π/2) = 0
        let zero = ChshSettings::new(0.0, PI, FRAC_PI_2, 3.0 * FRAC_PI_2);
        assert_abs_diff_eq!(chsh_value(&zero, &conv).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn comparison_rows() {
        let rep = comparison_table(&COMPARISON_PHASES, &PhaseConvention::default()).unwrap();
        assert_eq!(rep.rows.len(), 5);
        let first = rep.rows[0];
        assert_abs_diff_eq!(first.mzi_p1, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(first.correlation, 1.0, epsilon = 1e-12);
        let mid = rep.rows[2];
        assert_abs_diff_eq!(mid.mzi_p1, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(mid.correlation, 0.0, epsilon = 1e-12);
        let last = rep.rows[4];
        assert_abs_diff_eq!(last.mzi_p2, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(last.correlation, -1.0, epsilon = 1e-12);
        for r in &rep.rows {
            assert_abs_diff_eq!(r.rto_marginal, 0.5, epsilon = 1e-12);
        }
        assert_eq!(rep.notes.len(), 2);
    }
}
