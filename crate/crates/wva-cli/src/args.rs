//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "wva-lab",
    version,
    about = "Weak-value amplification laboratory: interferometer sweeps, \
             Fisher-information comparisons, and servo traces as CSV/JSON"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Amplified-phase and detector-signal curves over a theta grid,
    /// one file per weak value plus a combined file.
    Curves(CommonArgs),
    /// Fisher information versus dephasing strength for each weak value,
    /// with the standard-interferometry reference.
    Qfi(CommonArgs),
    /// Readout nonlinearity versus theta with the usable-phase bound.
    Nonlinearity(CommonArgs),
    /// Side-by-side scheme report plus a signal-to-noise sweep.
    Compare(CommonArgs),
    /// Closed-loop compensation trace for a single phase.
    Servo(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Flags shared by every subcommand; anything not expressible here comes
/// from the config file. Precedence: flag > config file > built-in default.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Flat key=value config file.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,

    /// RNG seed; required whenever noise sampling is requested.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Theta grid: log:A:B:N, lin:A:B:N, or comma list.
    #[arg(long = "theta-grid", value_name = "GRID")]
    pub theta_grid: Option<String>,

    /// Weak value(s): comma list, complex entries as RE+IMi.
    #[arg(long, value_name = "LIST")]
    pub aw: Option<String>,

    /// Eta (dephasing) grid, same syntax as --theta-grid.
    #[arg(long = "eta-grid", value_name = "GRID")]
    pub eta_grid: Option<String>,
}

impl Command {
    pub fn common(&self) -> &CommonArgs {
        match self {
            Self::Curves(a)
            | Self::Qfi(a)
            | Self::Nonlinearity(a)
            | Self::Compare(a)
            | Self::Servo(a) => a,
        }
    }
}
