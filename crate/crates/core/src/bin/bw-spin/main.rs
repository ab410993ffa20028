//! `bw-spin`: spin-correlation probabilities, Bell indicator searches and
//! energy sweeps for γγ → e⁺e⁻ on the command line.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bw_spin::oracle::{PolarizationSum, Route};
use bw_spin::{CircularUnits, Mode, DEFAULT_ELECTRON_MASS_MEV};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Linear,
    Circular,
    Unpolarized,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Linear => Mode::Linear,
            ModeArg::Circular => Mode::Circular,
            ModeArg::Unpolarized => Mode::Unpolarized,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitsArg {
    Mev,
    Normalized,
}

impl From<UnitsArg> for CircularUnits {
    fn from(u: UnitsArg) -> Self {
        match u {
            UnitsArg::Mev => CircularUnits::Mev,
            UnitsArg::Normalized => CircularUnits::Normalized,
        }
    }
}

/// Where probabilities come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceArg {
    /// Closed-form expressions.
    Closed,
    /// Numerical tree amplitude from Dirac matrices.
    Direct,
    /// Two-spinor reduced amplitude.
    Reduced,
}

impl SourceArg {
    pub fn route(&self) -> Option<Route> {
        match self {
            SourceArg::Closed => None,
            SourceArg::Direct => Some(Route::Direct),
            SourceArg::Reduced => Some(Route::Reduced),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SumArg {
    Coherent,
    Incoherent,
}

impl From<SumArg> for PolarizationSum {
    fn from(s: SumArg) -> Self {
        match s {
            SumArg::Coherent => PolarizationSum::Coherent,
            SumArg::Incoherent => PolarizationSum::Incoherent,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bw-spin", version, about = "Spin correlations and Bell indicator for e+e- pairs from photon-photon collisions")]
pub struct Cli {
    /// Electron mass in MeV.
    #[arg(long = "m-e", global = true, default_value_t = DEFAULT_ELECTRON_MASS_MEV)]
    pub m_e: f64,

    /// Angles in degrees (default).
    #[arg(long, global = true, conflicts_with = "radians")]
    pub degrees: bool,

    /// Angles in radians, for input and output.
    #[arg(long, global = true)]
    pub radians: bool,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Energy convention for the circular-mode closed form.
    #[arg(long = "circular-units", global = true, value_enum, default_value_t = UnitsArg::Mev)]
    pub circular_units: UnitsArg,

    /// Worker threads; 0 picks the number of CPUs.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct SourceArgs {
    #[arg(long, value_enum, default_value_t = SourceArg::Closed)]
    pub source: SourceArg,

    /// Polarization sum for the unpolarized mode with an amplitude source.
    #[arg(long, value_enum, default_value_t = SumArg::Coherent)]
    pub sum: SumArg,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct QuadArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub chi1: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub chi2: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub chi1p: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub chi2p: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Joint probability and both marginals at one angle pair.
    Prob {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1.05, allow_hyphen_values = true)]
        omega: f64,
        #[arg(long, allow_hyphen_values = true)]
        chi1: f64,
        #[arg(long, allow_hyphen_values = true)]
        chi2: f64,
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Indicator S at one measurement configuration.
    Bell {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1.05, allow_hyphen_values = true)]
        omega: f64,
        #[command(flatten)]
        quad: QuadArgs,
        /// Also list S for every distinct placement of the four angles.
        #[arg(long)]
        assignments: bool,
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Grid search plus refinement for the extremal S.
    Scan {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1.05, allow_hyphen_values = true)]
        omega: f64,
        /// Grid step in degrees.
        #[arg(long, default_value_t = 5.0)]
        step: f64,
        /// Refinement tolerance on S.
        #[arg(long = "tol", default_value_t = 1e-8)]
        tolerance: f64,
        #[arg(long = "top-k", default_value_t = 10)]
        top_k: usize,
        /// Number of grid points refined.
        #[arg(long, default_value_t = 3)]
        seeds: usize,
        /// Search for the largest S instead.
        #[arg(long)]
        maximize: bool,
        /// Scan a₁ too, even when only angle differences matter.
        #[arg(long = "no-shift")]
        no_shift: bool,
        #[command(flatten)]
        source: SourceArgs,
    },
    /// S at a fixed configuration over a list or range of energies.
    Sweep {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[command(flatten)]
        quad: QuadArgs,
        /// Comma-separated energies in MeV.
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["from", "to", "points"])]
        omegas: Option<Vec<f64>>,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long, default_value_t = 50)]
        points: usize,
        /// Logarithmic spacing for --from/--to.
        #[arg(long)]
        log: bool,
    },
    /// Recompute every reference S value and report the differences.
    VerifyPaper {
        /// Also write the JSON report to this file.
        #[arg(long = "json-out")]
        json_out: Option<std::path::PathBuf>,
    },
    /// Compare closed-form and amplitude-based probabilities at random angles.
    OracleCompare {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1.05, allow_hyphen_values = true)]
        omega: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = SourceArg::Direct)]
        route: SourceArg,
        #[arg(long, value_enum, default_value_t = SumArg::Coherent)]
        sum: SumArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            if let Some(note) = &out.stderr {
                eprint!("{note}");
            }
            print!("{}", out.stdout);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
