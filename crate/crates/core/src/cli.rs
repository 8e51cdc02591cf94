//! Command-line front end.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::analysis::{
    chsh_value, comparison_table, correlation_at, correlation_curve_at, phase_offset_check,
    uniform_grid, ChshSettings, COMPARISON_PHASES, DEFAULT_GRID_POINTS,
};
use crate::circuits::{mzi_probabilities, MziCircuit, RtoCircuit};
use crate::error::SimError;
use crate::montecarlo::{estimate_chsh, sample_trials};
use crate::optics::PhaseConvention;
use crate::output;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TRIALS: usize = 10_000;

/// Exit status for bad flags or arguments.
pub const EXIT_USAGE: i32 = 1;
/// Exit status when the output cannot be written.
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "rto-sim",
    version,
    about = "Two-photon interferometry simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single-photon Mach-Zehnder fringe over phi2 - phi1 in [0, pi]
    Mzi {
        #[command(flatten)]
        common: CommonArgs,
        /// Remove the second beam splitter (which-path configuration)
        #[arg(long)]
        no_bs2: bool,
    },
    /// Coincidence statistics over phi_B - phi_A in [0, pi]
    RtoSweep(CommonArgs),
    /// Monte Carlo CHSH estimate at the optimal settings
    Bell(CommonArgs),
    /// Individual detector clicks at fixed phi_A, phi_B
    Sample(CommonArgs),
    /// Single photon versus photon pair at five phases
    Table1(CommonArgs),
    /// Constant fringe offsets of P(A1,B1) and P(A1,B2)
    Offsets(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub n_trials: usize,
    /// Output CSV path; standard output when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi_a: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi_b: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub bs_reflection_phase: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub bs_transmission_phase: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mirror_phase: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Mzi,
    RtoSweep,
    Bell,
    Sample,
    Table1,
    Offsets,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Mzi => "mzi",
            CommandKind::RtoSweep => "rto-sweep",
            CommandKind::Bell => "bell",
            CommandKind::Sample => "sample",
            CommandKind::Table1 => "table1",
            CommandKind::Offsets => "offsets",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub grid_points: usize,
    pub seed: u64,
    pub n_trials: usize,
    pub output_path: Option<PathBuf>,
    pub phi_a: f64,
    pub phi_b: f64,
    pub bs_reflection_phase: Option<f64>,
    pub bs_transmission_phase: Option<f64>,
    pub mirror_phase: Option<f64>,
    pub no_bs2: bool,
}

impl RunConfig {
    pub fn new(command: CommandKind) -> Self {
        Self {
            command,
            grid_points: DEFAULT_GRID_POINTS,
            seed: DEFAULT_SEED,
            n_trials: DEFAULT_TRIALS,
            output_path: None,
            phi_a: 0.0,
            phi_b: 0.0,
            bs_reflection_phase: None,
            bs_transmission_phase: None,
            mirror_phase: None,
            no_bs2: false,
        }
    }

    fn from_common(command: CommandKind, a: CommonArgs, no_bs2: bool) -> Self {
        Self {
            command,
            grid_points: a.grid_points,
            seed: a.seed,
            n_trials: a.n_trials,
            output_path: a.out,
            phi_a: a.phi_a,
            phi_b: a.phi_b,
            bs_reflection_phase: a.bs_reflection_phase,
            bs_transmission_phase: a.bs_transmission_phase,
            mirror_phase: a.mirror_phase,
            no_bs2,
        }
    }

    pub fn convention(&self) -> PhaseConvention {
        let d = PhaseConvention::default();
        PhaseConvention::new(
            self.bs_reflection_phase.unwrap_or(d.bs_reflection_phase),
            self.bs_transmission_phase
                .unwrap_or(d.bs_transmission_phase),
            self.mirror_phase.unwrap_or(d.mirror_phase),
        )
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.grid_points < 2 {
            return Err(CliError::Usage(format!(
                "--grid-points must be at least 2, got {}",
                self.grid_points
            )));
        }
        if self.n_trials < 1 {
            return Err(CliError::Usage("--n-trials must be at least 1".into()));
        }
        if self.no_bs2 && self.command != CommandKind::Mzi {
            return Err(CliError::Usage("--no-bs2 only applies to mzi".into()));
        }
        self.convention().validate()?;
        Ok(())
    }
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        match cli.command {
            Command::Mzi { common, no_bs2 } => Self::from_common(CommandKind::Mzi, common, no_bs2),
            Command::RtoSweep(a) => Self::from_common(CommandKind::RtoSweep, a, false),
            Command::Bell(a) => Self::from_common(CommandKind::Bell, a, false),
            Command::Sample(a) => Self::from_common(CommandKind::Sample, a, false),
            Command::Table1(a) => Self::from_common(CommandKind::Table1, a, false),
            Command::Offsets(a) => Self::from_common(CommandKind::Offsets, a, false),
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Sim(SimError),
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Sim(_) => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Sim(e) => write!(f, "{e}"),
            CliError::Io { path, source } => {
                write!(f, "cannot write {}: {source}", path.display())
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Sim(e)
    }
}

/// CSV text and one-line summary of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub csv: String,
    pub summary: String,
}

/// Computes a run without touching the filesystem.
pub fn render(config: &RunConfig) -> Result<RunOutput, CliError> {
    config.validate()?;
    let conv = config.convention();
    let mut csv = output::comment_line(config.command.name(), config.seed, &conv);
    let summary = match config.command {
        CommandKind::Mzi => {
            let grid = uniform_grid(config.grid_points)?;
            let probs = grid
                .iter()
                .map(|d| {
                    MziCircuit::with_convention(
                        config.phi_a,
                        config.phi_a + d,
                        !config.no_bs2,
                        conv,
                    )
                    .map(|c| mzi_probabilities(&c))
                })
                .collect::<Result<Vec<_>, _>>()?;
            csv.push_str(&output::mzi_csv(&grid, &probs));
            format!(
                "mzi: {} points, bs2 {}, P(B1) from {} to {}",
                grid.len(),
                if config.no_bs2 { "removed" } else { "present" },
                output::fmt_float(probs[0].0),
                output::fmt_float(probs[probs.len() - 1].0),
            )
        }
        CommandKind::RtoSweep => {
            let grid = uniform_grid(config.grid_points)?;
            let sweep = correlation_curve_at(&grid, config.phi_a, &conv)?;
            let dev = sweep
                .rows
                .iter()
                .map(|r| r.marginals.max_deviation_from_half())
                .fold(0.0, f64::max);
            csv.push_str(&output::sweep_csv(&sweep));
            format!(
                "rto-sweep: {} points, correlation {} to {}, max marginal deviation from 1/2 {:.3e}",
                grid.len(),
                output::fmt_float(sweep.rows[0].correlation),
                output::fmt_float(sweep.rows[sweep.rows.len() - 1].correlation),
                dev
            )
        }
        CommandKind::Bell => {
            let settings = ChshSettings::OPTIMAL;
            let est = estimate_chsh(&settings, config.n_trials, config.seed, &conv)?;
            let terms = settings.terms();
            let mut exact = [0.0; 4];
            for (e, ((pa, pb), _)) in exact.iter_mut().zip(terms) {
                *e = correlation_at(pa, pb, &conv)?;
            }
            let s_exact = chsh_value(&settings, &conv)?;
            csv.push_str(&output::chsh_csv(&est, &terms, &exact));
            format!(
                "bell: S_hat={:.6} std_err={:.6} S_exact={:.6} significance={:.2} sigma above 2",
                est.s_hat,
                est.std_err,
                s_exact,
                est.sigma_above_classical()
            )
        }
        CommandKind::Sample => {
            let c = RtoCircuit::with_convention(config.phi_a, config.phi_b, conv)?;
            let trials = sample_trials(&c, config.n_trials, config.seed)?;
            let same = trials.iter().filter(|t| t.a_click == t.b_click).count();
            csv.push_str(&output::trials_csv(&trials));
            format!(
                "sample: {} trials at phi_A={} phi_B={}, {} same, {} different",
                trials.len(),
                output::fmt_float(config.phi_a),
                output::fmt_float(config.phi_b),
                same,
                trials.len() - same
            )
        }
        CommandKind::Table1 => {
            let report = comparison_table(&COMPARISON_PHASES, &conv)?;
            csv.push_str(&output::comparison_csv(&report));
            format!("table1: {} rows", report.rows.len())
        }
        CommandKind::Offsets => {
            let o = phase_offset_check(&conv)?;
            csv.push_str(&output::offsets_csv(&o));
            format!(
                "offsets: u={} v={} v-u={}",
                output::fmt_float(o.u),
                output::fmt_float(o.v),
                output::fmt_float(o.difference)
            )
        }
    };
    Ok(RunOutput { csv, summary })
}

/// Runs `config`, writing the CSV to `--out` (or standard output) and the
/// summary line to standard output (standard error when the CSV goes there).
pub fn run(config: &RunConfig) -> Result<RunOutput, CliError> {
    let out = render(config)?;
    match &config.output_path {
        Some(path) => {
            fs::write(path, &out.csv).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            println!("{}", out.summary);
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(out.csv.as_bytes())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })?;
            eprintln!("{}", out.summary);
        }
    }
    Ok(out)
}

/// Parses `args` and runs; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match run(&RunConfig::from(cli)) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("run `rto-sim --help` for usage");
            }
            e.exit_code()
        }
    }
}
