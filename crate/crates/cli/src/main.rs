//! Command-line driver: hypothesis checks, simulations, characteristic traces and sweeps.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::{EXIT_ABORTED, EXIT_USAGE};
use crate::config::{ConfigError, DirectionName, RunConfig};

#[derive(Parser)]
#[command(name = "gradcat", version, about = "Gradient blow-up experiments for the Lagrangian p-system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.directory`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structural hypotheses on the configured state box.
    Check(Common),
    /// Run the full pipeline and write the run directory.
    Simulate(Common),
    /// Trace characteristics from the given seeds.
    Trace {
        #[command(flatten)]
        common: Common,
        #[arg(long = "seed-x", allow_negative_numbers = true)]
        seed_x: Vec<f64>,
        #[arg(long, value_enum)]
        direction: Option<DirectionName>,
    },
    /// Repeat the simulation over values of one config key.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Dotted config key, e.g. `initial.params.amplitude`.
        #[arg(long)]
        axis: String,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        values: Vec<f64>,
    },
}

fn init_pool(workers: usize) {
    // a second initialisation only happens in tests and is harmless
    let _ = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build_global();
}

fn load(common: &Common) -> Result<RunConfig, ConfigError> {
    RunConfig::load(&common.config)
}

fn execute(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Check(c) => {
            init_pool(c.workers);
            let cfg = load(&c)?;
            Ok(if commands::check(&cfg, c.out.as_deref())? { 0 } else { 1 })
        }
        Command::Simulate(c) => {
            init_pool(c.workers);
            let cfg = load(&c)?;
            let status = commands::simulate(&cfg, c.out.as_deref())?;
            Ok(commands::status_code(status))
        }
        Command::Trace {
            common,
            seed_x,
            direction,
        } => {
            init_pool(common.workers);
            let cfg = load(&common)?;
            commands::trace(&cfg, common.out.as_deref(), &seed_x, direction)?;
            Ok(0)
        }
        Command::Sweep { common, axis, values } => {
            let rows = commands::sweep(&common.config, common.out.as_deref(), &axis, &values, common.workers)?;
            Ok(if rows.iter().all(|r| r.status.is_ok()) { 0 } else { EXIT_ABORTED })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
