//! Plain-text CSV writers. Floats carry 15 significant digits, `.` as the
//! decimal separator, `\n` line endings; every file starts with one `#`
//! comment line.

use std::fmt::Write;

use crate::analysis::{ComparisonReport, PhaseOffsets, SweepResult};
use crate::montecarlo::{ChshEstimate, TrialRecord};
use crate::optics::PhaseConvention;

/// Formats like C's `%.15g`.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.14e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..15).contains(&exp) {
        let m = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (14 - exp).max(0) as usize;
    trim_fraction(&format!("{x:.decimals$}")).to_string()
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Leading comment recording the tool version, seed and convention.
pub fn comment_line(command: &str, seed: u64, conv: &PhaseConvention) -> String {
    format!(
        "# rto-sim {} command={} seed={} bs_reflection_phase={} bs_transmission_phase={} mirror_phase={}\n",
        env!("CARGO_PKG_VERSION"),
        command,
        seed,
        fmt_float(conv.bs_reflection_phase),
        fmt_float(conv.bs_transmission_phase),
        fmt_float(conv.mirror_phase),
    )
}

fn row(out: &mut String, values: &[f64]) {
    let cells: Vec<String> = values.iter().map(|&v| fmt_float(v)).collect();
    out.push_str(&cells.join(","));
    out.push('\n');
}

pub fn sweep_csv(sweep: &SweepResult) -> String {
    let mut out = String::from("phase_diff,p11,p12,p21,p22,pA1,pB1,p_same,p_diff,correlation\n");
    for (d, t) in sweep.grid.iter().zip(&sweep.rows) {
        row(
            &mut out,
            &[
                *d,
                t.p[0][0],
                t.p[0][1],
                t.p[1][0],
                t.p[1][1],
                t.marginals.a[0],
                t.marginals.b[0],
                t.p_same,
                t.p_diff,
                t.correlation,
            ],
        );
    }
    out
}

pub fn trials_csv(trials: &[TrialRecord]) -> String {
    let mut out = String::from("trial_index,phi_A,phi_B,a_click,b_click\n");
    for t in trials {
        writeln!(
            out,
            "{},{},{},{},{}",
            t.trial_index,
            fmt_float(t.settings.0),
            fmt_float(t.settings.1),
            t.a_click,
            t.b_click
        )
        .expect("write to String");
    }
    out
}

pub fn comparison_csv(report: &ComparisonReport) -> String {
    let mut out = String::new();
    for note in &report.notes {
        writeln!(out, "# note: {note}").expect("write to String");
    }
    out.push_str("phase,mzi_p1,mzi_p2,rto_marginal,p_same,p_diff,correlation\n");
    for r in &report.rows {
        row(
            &mut out,
            &[
                r.phase,
                r.mzi_p1,
                r.mzi_p2,
                r.rto_marginal,
                r.p_same,
                r.p_diff,
                r.correlation,
            ],
        );
    }
    out
}

pub fn mzi_csv(grid: &[f64], probabilities: &[(f64, f64)]) -> String {
    let mut out = String::from("phase_diff,p_b1,p_b2\n");
    for (d, (p1, p2)) in grid.iter().zip(probabilities) {
        row(&mut out, &[*d, *p1, *p2]);
    }
    out
}

pub fn offsets_csv(o: &PhaseOffsets) -> String {
    let mut out = String::from("u,v,difference\n");
    row(&mut out, &[o.u, o.v, o.difference]);
    out
}

/// One row per setting pair, in CHSH term order.
pub fn chsh_csv(est: &ChshEstimate, terms: &[((f64, f64), f64); 4], exact: &[f64; 4]) -> String {
    let mut out = String::from("term,sign,phi_A,phi_B,n,n11,n12,n21,n22,e_hat,std_err,e_exact\n");
    for (k, (((pa, pb), sign), st)) in terms.iter().zip(&est.per_setting).enumerate() {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            k + 1,
            fmt_float(*sign),
            fmt_float(*pa),
            fmt_float(*pb),
            st.n,
            st.counts[0][0],
            st.counts[0][1],
            st.counts[1][0],
            st.counts[1][1],
            fmt_float(st.c_hat),
            fmt_float(st.std_err),
            fmt_float(exact[k]),
        )
        .expect("write to String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fmt_float_matches_printf_g15() {
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(-0.0), "0");
        assert_eq!(fmt_float(1.0), "1");
        assert_eq!(fmt_float(0.5), "0.5");
        assert_eq!(fmt_float(-1.0), "-1");
        assert_eq!(fmt_float(std::f64::consts::PI), "3.14159265358979");
        assert_eq!(fmt_float(0.1 + 0.2), "0.3");
        assert_eq!(fmt_float(6.123233995736766e-17), "6.12323399573677e-17");
        assert_eq!(fmt_float(1e15), "1e+15");
        assert_eq!(fmt_float(123456.0), "123456");
        assert_eq!(fmt_float(0.0001), "0.0001");
        assert_eq!(fmt_float(0.00001), "1e-05");
        assert_eq!(fmt_float(0.999999999999999999), "1");
    }

    proptest! {
        #[test]
        fn fmt_float_roundtrips_to_15_digits(x in -1e6..1e6f64) {
            let back: f64 = fmt_float(x).parse().unwrap();
            prop_assert!((back - x).abs() <= 1e-14 * x.abs().max(1e-300));
        }
    }
}
