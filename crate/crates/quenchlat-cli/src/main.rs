//! `quenchlat` command line: entanglement-entropy dynamics of free lattice
//! fermions after a quantum quench.
//!
//! `run` executes a JSON-described experiment (state, region, time grid,
//! engines) and writes one CSV per engine plus a `report.json` with
//! pairwise agreement statistics and the fully resolved config.
//! `reproduce` regenerates the data behind the built-in reference figures
//! at desk-scale resolution.
//!
//! Exit status: 0 success, 1 configuration error, 2 runtime error.

mod config;
mod error;
mod figures;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::ExperimentConfig;
use error::{config_err, runtime_err, CliError};
use quenchlat_core::exec::ExecMode;

#[derive(Parser)]
#[command(
    name = "quenchlat",
    version,
    about = "Entanglement-entropy dynamics of free lattice fermions after a quench"
)]
struct Cli {
    /// Cap the number of worker threads (results are identical for any cap).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config file.
    ///
    /// Writes one CSV per selected engine (columns
    /// t,zeta,entropy_density,stderr,engine) plus report.json into the
    /// output directory. Engines run in the listed order, each internally
    /// parallel. The QUENCHLAT_SEED environment variable overrides the
    /// config seed.
    Run {
        /// Path to the experiment config (JSON).
        config: PathBuf,
        /// Output directory (overrides the config's `output` field).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the data behind a built-in reference figure.
    ///
    /// Every state/region/angle combination in the figure becomes its own
    /// subdirectory with config.json, per-engine CSVs and report.json; any
    /// of them can be upscaled later with `quenchlat run`.
    Reproduce {
        /// Figure id: fig3a, fig3b, fig5, fig6 or fig7.
        figure: String,
        /// Parent output directory (default: figures/<id>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the Monte Carlo sample count per time point.
        #[arg(long)]
        mc_samples: Option<u64>,
        /// Override the number of time points per curve.
        #[arg(long)]
        time_points: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(config_err("--threads must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| runtime_err(format!("cannot build thread pool: {e}")))?;
    }
    let mode = ExecMode::default();
    match cli.command {
        Command::Run { config, out } => {
            let resolved = ExperimentConfig::from_file(&config)?.resolve(out.as_deref())?;
            let artifacts = runner::execute(&resolved, mode)?;
            for path in &artifacts.csv_paths {
                println!("wrote {}", path.display());
            }
            if let Some(v) = artifacts.stationary_value {
                println!("stationary density: {v}");
            }
            println!("wrote {}", artifacts.report_path.display());
            Ok(())
        }
        Command::Reproduce { figure, out, mc_samples, time_points } => {
            figures::reproduce(&figure, out.as_deref(), mc_samples, time_points, mode)
        }
    }
}
