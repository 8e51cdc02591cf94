//! Seeded sampling of detector clicks from the analytic joint distribution.
//!
//! Generator: ChaCha20 (`rand_chacha` 0.3) keyed by `seed_from_u64(seed)`.
//! Each setting pair gets its own stream, and trial `t` reads the 64-bit
//! word at word position `2t` of that stream, mapped to `[0, 1)` by the top
//! 53 bits. The mapping from `(seed, stream, t)` to a draw is therefore fixed
//! and independent of how the trial range is partitioned across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::analysis::{coincidence_table, ChshSettings};
use crate::circuits::RtoCircuit;
use crate::error::{Result, SimError};
use crate::optics::PhaseConvention;

/// Identifies the draw procedure above; bump if it ever changes.
pub const RNG_ALGORITHM: &str = "chacha20-wordpos-v1";

/// Trials per parallel partition.
const CHUNK: usize = 8192;

/// Smallest per-setting sample accepted by [`estimate_chsh`].
pub const MIN_CHSH_TRIALS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub trial_index: u64,
    /// Detector index 1 or 2.
    pub a_click: u8,
    pub b_click: u8,
    pub settings: (f64, f64),
}

/// Picks a cell of the flattened `[p11, p12, p21, p22]` table for `u ∈ [0, 1)`.
fn categorical(cells: &[f64; 4], u: f64) -> usize {
    let mut acc = 0.0;
    for (k, p) in cells.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    // rounding left u above the running total: take the last populated cell
    cells.iter().rposition(|&p| p > 0.0).unwrap_or(3)
}

fn draw_range(
    cells: &[f64; 4],
    settings: (f64, f64),
    seed: u64,
    stream: u64,
    start: usize,
    end: usize,
) -> Vec<TrialRecord> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(2 * start as u128);
    (start..end)
        .map(|t| {
            let k = categorical(cells, rng.gen::<f64>());
            TrialRecord {
                trial_index: t as u64,
                a_click: (k / 2) as u8 + 1,
                b_click: (k % 2) as u8 + 1,
                settings,
            }
        })
        .collect()
}

/// `n` trials on stream `stream`, partitioned across threads and merged in
/// trial order.
pub fn sample_trials_on_stream(
    c: &RtoCircuit,
    n: usize,
    seed: u64,
    stream: u64,
) -> Result<Vec<TrialRecord>> {
    if n == 0 {
        return Err(SimError::TooFewTrials { min: 1, got: 0 });
    }
    let p = coincidence_table(c).p;
    let cells = [p[0][0], p[0][1], p[1][0], p[1][1]];
    let settings = (c.phi_a, c.phi_b);
    let starts: Vec<usize> = (0..n).step_by(CHUNK).collect();
    let parts: Vec<Vec<TrialRecord>> = starts
        .par_iter()
        .map(|&s| draw_range(&cells, settings, seed, stream, s, (s + CHUNK).min(n)))
        .collect();
    Ok(parts.into_iter().flatten().collect())
}

pub fn sample_trials(c: &RtoCircuit, n: usize, seed: u64) -> Result<Vec<TrialRecord>> {
    sample_trials_on_stream(c, n, seed, 0)
}

/// Single-threaded reference draw, used to check partition invariance.
#[doc(hidden)]
pub fn sample_trials_sequential(
    c: &RtoCircuit,
    n: usize,
    seed: u64,
    stream: u64,
) -> Vec<TrialRecord> {
    let p = coincidence_table(c).p;
    let cells = [p[0][0], p[0][1], p[1][0], p[1][1]];
    draw_range(&cells, (c.phi_a, c.phi_b), seed, stream, 0, n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    pub n: usize,
    /// `counts[i][j]` = coincidences at `(A(i+1), B(j+1))`
    pub counts: [[u64; 2]; 2],
    pub c_hat: f64,
    pub std_err: f64,
}

impl SampleStats {
    pub fn from_trials(trials: &[TrialRecord]) -> Self {
        let mut counts = [[0u64; 2]; 2];
        for t in trials {
            counts[(t.a_click - 1) as usize][(t.b_click - 1) as usize] += 1;
        }
        let n = trials.len();
        let same = counts[0][0] + counts[1][1];
        let diff = counts[0][1] + counts[1][0];
        let c_hat = if n == 0 {
            0.0
        } else {
            (same as f64 - diff as f64) / n as f64
        };
        let std_err = if n == 0 {
            0.0
        } else {
            ((1.0 - c_hat * c_hat).max(0.0) / n as f64).sqrt()
        };
        Self {
            n,
            counts,
            c_hat,
            std_err,
        }
    }

    /// Empirical coincidence frequencies.
    pub fn frequencies(&self) -> [[f64; 2]; 2] {
        let n = self.n.max(1) as f64;
        self.counts.map(|row| row.map(|c| c as f64 / n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshEstimate {
    pub s_hat: f64,
    /// Per-term standard errors combined in quadrature.
    pub std_err: f64,
    pub per_setting: [SampleStats; 4],
}

impl ChshEstimate {
    /// `(S_hat − 2) / std_err`; infinite when the error vanishes above the bound.
    pub fn sigma_above_classical(&self) -> f64 {
        let excess = self.s_hat - 2.0;
        if self.std_err > 0.0 {
            excess / self.std_err
        } else if excess > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }
}

/// Samples each of the four setting pairs on its own stream and combines the
/// estimated correlations into `S_hat`.
pub fn estimate_chsh(
    settings: &ChshSettings,
    n_per_setting: usize,
    seed: u64,
    conv: &PhaseConvention,
) -> Result<ChshEstimate> {
    if n_per_setting < MIN_CHSH_TRIALS {
        return Err(SimError::TooFewTrials {
            min: MIN_CHSH_TRIALS,
            got: n_per_setting,
        });
    }
    let mut stats = Vec::with_capacity(4);
    let mut s = 0.0;
    let mut var = 0.0;
    for (stream, ((pa, pb), sign)) in settings.terms().into_iter().enumerate() {
        let c = RtoCircuit::with_convention(pa, pb, *conv)?;
        let st = SampleStats::from_trials(&sample_trials_on_stream(
            &c,
            n_per_setting,
            seed,
            stream as u64,
        )?);
        s += sign * st.c_hat;
        var += st.std_err * st.std_err;
        stats.push(st);
    }
    Ok(ChshEstimate {
        s_hat: s.abs(),
        std_err: var.sqrt(),
        per_setting: stats.try_into().expect("four settings"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    #[test]
    fn zero_phase_clicks_always_agree() {
        for n in [1, 17, 20_000] {
            let trials = sample_trials(&RtoCircuit::new(0.0, 0.0).unwrap(), n, 9).unwrap();
            assert_eq!(trials.len(), n);
            assert!(trials.iter().all(|t| t.a_click == t.b_click));
        }
    }

    #[test]
    fn pi_phase_clicks_always_differ() {
        let trials = sample_trials(&RtoCircuit::new(0.5, 0.5 + PI).unwrap(), 20_000, 9).unwrap();
        assert!(trials.iter().all(|t| t.a_click != t.b_click));
    }

    #[test]
    fn quarter_phase_correlation_near_zero() {
        let trials = sample_trials(&RtoCircuit::new(0.0, FRAC_PI_2).unwrap(), 10_000, 42).unwrap();
        let st = SampleStats::from_trials(&trials);
        assert!(st.c_hat.abs() < 0.03, "c_hat = {}", st.c_hat);
        assert_eq!(st.counts.iter().flatten().sum::<u64>(), 10_000);
    }

    #[test]
    fn zero_trials_rejected() {
        assert_eq!(
            sample_trials(&RtoCircuit::new(0.0, 0.0).unwrap(), 0, 1).unwrap_err(),
            SimError::TooFewTrials { min: 1, got: 0 }
        );
        assert!(matches!(
            estimate_chsh(&ChshSettings::OPTIMAL, 99, 1, &PhaseConvention::default()),
            Err(SimError::TooFewTrials { min: 100, got: 99 })
        ));
    }

    #[test]
    fn partitioned_draw_equals_sequential_draw() {
        let c = RtoCircuit::new(0.1, 1.2).unwrap();
        let n = 3 * CHUNK + 123;
        assert_eq!(
            sample_trials_on_stream(&c, n, 5, 2).unwrap(),
            sample_trials_sequential(&c, n, 5, 2)
        );
        // prefixes agree: trial t does not depend on n
        let short = sample_trials_on_stream(&c, 1000, 5, 2).unwrap();
        assert_eq!(
            &sample_trials_sequential(&c, n, 5, 2)[..1000],
            short.as_slice()
        );
    }

    #[test]
    fn seeds_and_streams_differ() {
        let c = RtoCircuit::new(0.0, FRAC_PI_2).unwrap();
        let a = sample_trials_on_stream(&c, 500, 1, 0).unwrap();
        let b = sample_trials_on_stream(&c, 500, 2, 0).unwrap();
        let d = sample_trials_on_stream(&c, 500, 1, 1).unwrap();
        assert_ne!(a, b);
        assert_ne!(a, d);
    }

    #[test]
    fn std_err_formula() {
        let trials = sample_trials(&RtoCircuit::new(0.0, 1.0).unwrap(), 4000, 3).unwrap();
        let st = SampleStats::from_trials(&trials);
        assert!((st.std_err - ((1.0 - st.c_hat * st.c_hat) / 4000.0).sqrt()).abs() < 1e-15);
        assert!((-1.0..=1.0).contains(&st.c_hat));
    }

    #[test]
    fn chsh_estimate_violates_bound() {
        let est = estimate_chsh(
            &ChshSettings::OPTIMAL,
            10_000,
            42,
            &PhaseConvention::default(),
        )
        .unwrap();
        assert!((est.s_hat - 2.0 * SQRT_2).abs() < 5.0 * est.std_err);
        assert!(est.sigma_above_classical() > 5.0);
    }

    #[test]
    fn degenerate_settings_sit_on_bound() {
        let est = estimate_chsh(
            &ChshSettings::new(0.0, 0.0, 0.0, 0.0),
            10_000,
            42,
            &PhaseConvention::default(),
        )
        .unwrap();
        // every setting is perfectly correlated: S_hat is exactly 2
        assert_eq!(est.s_hat, 2.0);
        assert_eq!(est.std_err, 0.0);
        assert_eq!(est.sigma_above_classical(), 0.0);
    }

    #[test]
    fn small_samples_have_wider_errors() {
        let conv = PhaseConvention::default();
        let small = estimate_chsh(&ChshSettings::OPTIMAL, 100, 42, &conv).unwrap();
        let big = estimate_chsh(&ChshSettings::OPTIMAL, 10_000, 42, &conv).unwrap();
        assert!(small.std_err > 5.0 * big.std_err);
        assert!((small.s_hat - 2.0 * SQRT_2).abs() < 5.0 * small.std_err);
    }

    #[test]
    fn categorical_edges() {
        let cells = [0.5, 0.0, 0.0, 0.5];
        assert_eq!(categorical(&cells, 0.0), 0);
        assert_eq!(categorical(&cells, 0.4999), 0);
        assert_eq!(categorical(&cells, 0.5), 3);
        assert_eq!(categorical(&[0.3, 0.3, 0.3, 0.0], 0.95), 2);
    }
}
