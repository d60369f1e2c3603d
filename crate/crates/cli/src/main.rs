//! Command-line front end for the walk simulator.
//!
//! Exit codes: 0 on success, 2 for configuration or usage errors, 3 for
//! numerical failures. Diagnostics go to `stderr`.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use susywalk::Error;

use config::{AngleValue, FrameName, Overrides, RunConfig, Settings};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::EigenFailure { .. }
            | Error::SymmetryViolation { .. }
            | Error::GapClosed { .. }
            | Error::NotNormalized(_)
            | Error::SiteUnoccupied(_)
            | Error::NoIntensity => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "susywalk", version, about = "Photonic quantum walk with chiral symmetry and unitary supersymmetry")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve a localized input and emit per-step, per-site probabilities.
    Evolve(CommonArgs),
    /// Quasi-energy bands of the bulk Bloch operator.
    Bands(CommonArgs),
    /// Winding numbers for (phi1, phi2) and the swapped ordering.
    Winding(CommonArgs),
    /// Midgap states of a ring with two interfaces.
    Midgap(CommonArgs),
    /// Trapped intensity versus quarter-wave-plate angle.
    Scan(CommonArgs),
    /// Polarization tomography at one site.
    Tomo(CommonArgs),
}

#[derive(Debug, Clone, Args)]
struct CommonArgs {
    /// Coin angle on odd sites (radians, or suffix `deg`).
    #[arg(long, allow_hyphen_values = true)]
    phi1: Option<AngleValue>,
    /// Coin angle on even sites (radians, or suffix `deg`).
    #[arg(long, allow_hyphen_values = true)]
    phi2: Option<AngleValue>,
    #[arg(long)]
    steps: Option<usize>,
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the data table here; the summary then goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of k points.
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long, value_enum)]
    frame: Option<FrameName>,
    /// Relative Gaussian noise on measured intensities.
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Ring size (sites); omitted means sized automatically.
    #[arg(long)]
    lattice: Option<usize>,
}

impl CommonArgs {
    fn settings(&self) -> Result<Settings, CliError> {
        let file = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let cli = Overrides {
            phi1: self.phi1.clone(),
            phi2: self.phi2.clone(),
            steps: self.steps,
            resolution: self.resolution,
            output: self.out.clone(),
            frame: self.frame,
            noise: self.noise,
            seed: self.seed,
            lattice: self.lattice,
        };
        Settings::resolve(file, cli)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (args, f): (&CommonArgs, fn(&Settings) -> Result<output::Output, CliError>) =
        match &cli.command {
            Command::Evolve(a) => (a, commands::evolve_cmd),
            Command::Bands(a) => (a, commands::bands_cmd),
            Command::Winding(a) => (a, commands::winding_cmd),
            Command::Midgap(a) => (a, commands::midgap_cmd),
            Command::Scan(a) => (a, commands::scan_cmd),
            Command::Tomo(a) => (a, commands::tomo_cmd),
        };
    let settings = args.settings()?;
    let out = f(&settings)?;
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    out.emit(settings.output.as_deref(), &mut lock)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
