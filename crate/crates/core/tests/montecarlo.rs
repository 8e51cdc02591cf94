use std::f64::consts::{FRAC_PI_3, PI};

use rto_sim::analysis::coincidence_table;
use rto_sim::montecarlo::{sample_trials, sample_trials_on_stream, SampleStats};
use rto_sim::output::trials_csv;
use rto_sim::RtoCircuit;

#[test]
fn large_sample_matches_analytic_correlation() {
    let n = 1_000_000;
    for (k, delta) in [0.3, FRAC_PI_3, 2.0, 2.9].into_iter().enumerate() {
        let c = RtoCircuit::new(0.1, 0.1 + delta).unwrap();
        let st = SampleStats::from_trials(&sample_trials(&c, n, 1000 + k as u64).unwrap());
        let exact = delta.cos();
        let z = (st.c_hat - exact) / st.std_err;
        if z.abs() > 5.0 {
            eprintln!(
                "warning: delta={delta} c_hat={} exact={exact} z={z:.2}",
                st.c_hat
            );
        }
        assert!(
            z.abs() < 8.0,
            "delta={delta} c_hat={} exact={exact} z={z}",
            st.c_hat
        );
    }
}

#[test]
fn empirical_marginals_are_flat() {
    let n = 200_000;
    let half_err = (0.25 / n as f64).sqrt();
    for delta in [0.0, 0.8, PI / 2.0, PI] {
        let c = RtoCircuit::new(0.0, delta).unwrap();
        let f = SampleStats::from_trials(&sample_trials(&c, n, 77).unwrap()).frequencies();
        let a1 = f[0][0] + f[0][1];
        let b1 = f[0][0] + f[1][0];
        assert!(
            (a1 - 0.5).abs() < 5.0 * half_err,
            "delta={delta} P(A1)={a1}"
        );
        assert!(
            (b1 - 0.5).abs() < 5.0 * half_err,
            "delta={delta} P(B1)={b1}"
        );
    }
}

#[test]
fn cell_frequencies_track_joint_probabilities() {
    let n = 400_000;
    let c = RtoCircuit::new(0.4, 1.7).unwrap();
    let p = coincidence_table(&c).p;
    let f = SampleStats::from_trials(&sample_trials(&c, n, 5).unwrap()).frequencies();
    for i in 0..2 {
        for j in 0..2 {
            let sigma = (p[i][j] * (1.0 - p[i][j]) / n as f64).sqrt();
            assert!((f[i][j] - p[i][j]).abs() < 6.0 * sigma, "cell {i}{j}");
        }
    }
}

#[test]
fn serialized_trials_are_deterministic() {
    let c = RtoCircuit::new(0.0, 2.2).unwrap();
    let a = trials_csv(&sample_trials_on_stream(&c, 50_000, 123, 3).unwrap());
    let b = trials_csv(&sample_trials_on_stream(&c, 50_000, 123, 3).unwrap());
    assert_eq!(a.as_bytes(), b.as_bytes());
}
