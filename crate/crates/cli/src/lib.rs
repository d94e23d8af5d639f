//! Command-line front end: reads a TOML config, evaluates the transducer model on
//! grids and sweeps, and writes CSV/JSON tables plus a `manifest.json` per run.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use transducer::config::Config;

pub mod calibrate;
pub mod commands;
pub mod grid;
pub mod output;
pub mod sweep;

pub use grid::{GridError, GridSpec, Scale};
pub use output::RunRecord;

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_UNSTABLE: u8 = 3;
pub const EXIT_FIT: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "transducer", version, about = "Electro-optomechanical transducer model")]
pub struct Cli {
    /// TOML configuration; built-in device defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Seed for synthetic measurement noise.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reflection and transduction around the shifted mechanical frequency.
    Sparams(GridArgs),
    /// Operating-point quantities along one or two drive axes.
    Sweep(sweep::SweepArgs),
    /// Layered output noise spectra of both ports.
    Noise(GridArgs),
    /// Classical phase-modulator figures of merit.
    Fom,
    /// Parameter fits on synthetic or supplied spectra.
    Calibrate {
        #[command(subcommand)]
        fit: calibrate::Fit,
    },
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Offsets from the shifted mechanical frequency in Hz, `start:stop:points[:log]`.
    #[arg(long, allow_hyphen_values = true, default_value = "-2000:2000:401")]
    pub grid: GridSpec,
}

/// Shared state for one invocation.
pub struct Ctx {
    pub config: Config,
    pub out: PathBuf,
    pub seed: u64,
    pub pool: rayon::ThreadPool,
}

impl Ctx {
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        let config = match &cli.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build()?;
        std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
        Ok(Ctx {
            config,
            out: cli.out.clone(),
            seed: cli.seed,
            pool,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.out
    }

    pub fn record(&self, command: &str) -> RunRecord {
        RunRecord::new(command, &self.config, self.seed)
    }
}

/// Runs one command and returns the manifest path.
pub fn run(cli: &Cli) -> Result<PathBuf> {
    let ctx = Ctx::from_cli(cli)?;
    match &cli.command {
        Command::Sparams(a) => commands::sparams(&ctx, &a.grid),
        Command::Sweep(a) => sweep::run(&ctx, a),
        Command::Noise(a) => commands::noise(&ctx, &a.grid),
        Command::Fom => commands::fom(&ctx),
        Command::Calibrate { fit } => calibrate::run(&ctx, fit),
    }
}

/// Exit status for a failed run: 2 config or input error, 3 instability,
/// 4 fit non-convergence, 1 anything else.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    use transducer::Error as E;
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::Config(_) | E::InvalidParameter { .. } | E::Parse { .. } | E::InsufficientData(_) => EXIT_CONFIG,
                E::Unstable { .. } => EXIT_UNSTABLE,
                E::FitNonConvergence { .. } => EXIT_FIT,
                _ => 1,
            };
        }
        if cause.downcast_ref::<GridError>().is_some() {
            return EXIT_CONFIG;
        }
    }
    1
}
